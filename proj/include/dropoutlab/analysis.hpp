#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dropoutlab/optimize.hpp"

namespace dropoutlab {

/// Probability that sign(w.x) != y; a zero margin counts as an error.
double zero_one_error(const DiscreteSource& source, const Vector& w);

/// Error of (w1, w2, ..., w2) on an exchangeable source, using the undropped
/// tail law with labels clamped at +1.
double zero_one_error_reduced(const ExchangeableSource& source, const ReducedWeight& rw);

/// Smallest |w.x| over the support.
double min_abs_margin(const DiscreteSource& source, const Vector& w);

/// num / den with x/0 = +inf for x > 0 and 0/0 = 1.
double separation_ratio(double num, double den);

struct Witness {
  std::string description;
  double value = 0.0;
};

struct NamedResult {
  std::string name;
  OptimizationResult result;
};

/// Errors of dropout and a regularizer on two sources. P is the source on
/// which the regularizer is expected to win, Q the one favoring dropout.
struct SeparationReport {
  std::string experiment;
  std::string source_p;
  std::string source_q;
  std::string regularizer;
  double q = 0.0;
  double lambda = 0.0;
  double er_dropout_p = 0.0;
  double er_reg_p = 0.0;
  double er_dropout_q = 0.0;
  double er_reg_q = 0.0;
  /// min(er_dropout_p / er_reg_p, er_reg_q / er_dropout_q).
  double c_achieved = 0.0;
  std::vector<NamedResult> solves;
  std::vector<Witness> witnesses;
};

SeparationReport run_separation_2d(double q, double lambda, const SolverConfig& cfg = {});
SeparationReport run_separation_l1(double lambda, double q = 0.5, const SolverConfig& cfg = {});

/// Parameters of the label-symmetric high-dimensional source. Unset beta is
/// 1/(10 sqrt(n-1)) with alpha = beta*lambda/2; unset eta comes from
/// derive_feasible_eta.
struct P8Params {
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> beta;
};

SeparationReport run_separation_highdim(std::size_t n, double q, double lambda, const P8Params& params = {},
                                        const SolverConfig& cfg = {});

double p8_default_beta(std::size_t n);
/// 1 / (2 + e^{54 sqrt(n)}); zero once the exponential overflows.
double p8_literal_eta(std::size_t n);

struct EtaDerivation {
  double eta = 0.0;
  double er_dropout = 0.0;
  OptimizationResult solve;
  std::size_t probes = 0;
};

/// Log-space bisection for the largest eta in [1e-300, 0.45] at which the
/// solved reduced dropout minimizer has error equal to eta within 1e-12 and
/// alpha w1 > (n-1) abs(w2), so the head feature decides every example.
/// Returns the lower (passing) end once the bracket is within a quarter decade.
EtaDerivation derive_feasible_eta(std::size_t n, double q, double alpha, double beta,
                                  const SolverConfig& cfg = {});

struct TheoremCheckResult {
  std::string id;
  bool passed = false;
  std::vector<Witness> witnesses;
  double tolerance = 0.0;
};

struct RegularizerTolerances {
  double limit = 1e-6;
  double bound = 1e-9;
  double identity = 1e-10;
  double nonneg = 1e-12;
  double closed_form = 1e-10;
};

std::vector<TheoremCheckResult> verify_regularizer_theorems(const RegularizerTolerances& tol = {});

/// Pr(S/(n-1) < -2 beta) for the undropped independent-signs tail.
double slud_probability(std::size_t n, double beta);
/// Pr(S in [beta(n-1), 3 beta(n-1)]) for the undropped independent-signs tail.
double hump_probability(std::size_t n, double beta);

/// The two tail-probability lemmas, ids lemma-slud and lemma-hump.
std::vector<TheoremCheckResult> verify_probability_lemmas(std::size_t n, double beta);

/// Every check id of the full suite, in report order.
const std::vector<std::string>& verify_check_ids();

/// Runs the named checks (all when `only` is empty) and returns them in report
/// order. Throws std::invalid_argument on an unknown id.
std::vector<TheoremCheckResult> run_verify_suite(const std::vector<std::string>& only = {});

struct Window {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct Resolution {
  std::size_t nx = 2;
  std::size_t ny = 2;
};

/// Row-major samples: values[j * xs.size() + i] is the surface at (xs[i], ys[j]).
struct Grid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[j * xs.size() + i]; }
};

using Surface = std::function<double(double, double)>;

/// Evenly spaced axis including both endpoints.
std::vector<double> linspace(double lo, double hi, std::size_t count);

Grid grid_scan(const Surface& surface, const Window& window, const Resolution& resolution);
Grid grid_scan(const Criterion& c, const Window& window, const Resolution& resolution);

}  // namespace dropoutlab
