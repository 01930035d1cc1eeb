#pragma once

#include <cstddef>
#include <vector>

namespace dropoutlab {

struct PmfEntry {
  double value = 0.0;
  double prob = 0.0;
};

/// Exact probability mass function over finitely many real values.
///
/// Support values are strictly increasing and every listed probability is
/// positive; masses sum to one within kPmfTolerance.
class Pmf {
 public:
  /// Builds from unsorted (value, prob) pairs. Equal values are merged and
  /// zero-mass entries dropped. The total is checked against kPmfTolerance
  /// and then rescaled to exactly the computed sum of one.
  static Pmf from_masses(std::vector<PmfEntry> masses);

  /// Point mass at `value`.
  static Pmf delta(double value);

  const std::vector<PmfEntry>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }

  double total() const;
  double mean() const;
  /// Pr(X == value), zero if value is not in the support.
  double prob_of(double value) const;

 private:
  std::vector<PmfEntry> support_;
};

inline constexpr double kPmfTolerance = 1e-10;

/// Integer-valued law stored densely: prob[k] = Pr(X = offset + k).
struct IntegerPmf {
  long offset = 0;
  std::vector<double> prob;

  Pmf to_pmf() const;
};

/// Distribution of the sum of two independent integer-valued variables.
IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b);

/// Binomial(trials, success) as a dense pmf, built by repeated Bernoulli
/// convolution.
IntegerPmf binomial_pmf(std::size_t trials, double success);

}  // namespace dropoutlab
