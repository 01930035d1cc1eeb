#include "dropoutlab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "dropoutlab/errors.hpp"

namespace dropoutlab {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
  if (max_iterations == 0) throw std::invalid_argument("SolverConfig: max_iterations must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("SolverConfig: shrink must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw std::invalid_argument("SolverConfig: sufficient_decrease must lie in (0, 1)");
  }
  for (double v : initial_point) {
    if (!std::isfinite(v)) throw std::invalid_argument("SolverConfig: non-finite initial point");
  }
}

WeightVector Ray::at(double t) const {
  if (origin.size() != direction.size()) throw std::invalid_argument("Ray: dimension mismatch");
  WeightVector w(origin.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = origin[i] + t * direction[i];
  return w;
}

Vector coordinate_scales(const Criterion& c) {
  Vector m(c.dimension(), 0.0);
  if (c.is_reduced()) {
    for (const auto& h : c.tables().head.support()) m[0] = std::max(m[0], std::abs(h.value));
    double second = 0.0;
    for (const auto& s : c.tables().tail.support()) second += s.prob * s.value * s.value;
    m[1] = std::sqrt(second);
  } else {
    for (const auto& atom : c.discrete().atoms()) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], std::abs(atom.x[i]));
    }
  }
  for (double& v : m) {
    if (!(v > 0.0)) v = 1.0;
  }
  return m;
}

namespace {

using Objective = std::function<Evaluation(const Vector&)>;

constexpr double kEpsilon = std::numeric_limits<double>::epsilon();
constexpr double kMinStep = 1e-30;
constexpr double kLevenberg = 1e-12;
// Gradient descent hands over to Newton below this scaled gradient norm.
constexpr double kNewtonSwitch = 1e-4;
constexpr std::size_t kNewtonSwitchIterations = 2000;

double inf_norm(const Vector& v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

double certificate(const Vector& g, const Vector& m) {
  double n = inf_norm(g);
  for (std::size_t i = 0; i < g.size(); ++i) n = std::max(n, std::abs(g[i] / m[i]));
  return n;
}

Vector axpy(const Vector& w, double t, const Vector& d) {
  Vector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] + t * d[i];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct State {
  Vector w;
  Evaluation eval;
  double norm = 0.0;
};

// Armijo backtracking along d. A step that only loses to rounding in the value
// is still taken when it shrinks the gradient.
bool line_search(const Objective& f, const Vector& m, const SolverConfig& cfg, State& s,
                 const Vector& d, double& step) {
  const double slope = dot(s.eval.gradient, d);
  if (!(slope < 0.0)) return false;
  const double slack = 8.0 * kEpsilon * std::max(1.0, std::abs(s.eval.value));
  for (double t = step; t >= kMinStep; t *= cfg.shrink) {
    Vector trial = axpy(s.w, t, d);
    bool finite = true;
    for (double v : trial) finite = finite && std::isfinite(v);
    if (!finite) continue;
    Evaluation e = f(trial);
    if (!std::isfinite(e.value)) continue;
    const double norm = certificate(e.gradient, m);
    const bool armijo = e.value <= s.eval.value + cfg.sufficient_decrease * t * slope;
    const bool rounding = e.value <= s.eval.value + slack && norm < s.norm;
    if (armijo || rounding) {
      s.w = std::move(trial);
      s.eval = std::move(e);
      s.norm = norm;
      step = t;
      return true;
    }
  }
  return false;
}

Vector scaled_descent(const Vector& g, const Vector& m) {
  Vector d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i] / (m[i] * m[i]);
  return d;
}

// Solves (H + mu I) d = -g for small dense H by Gaussian elimination with
// partial pivoting. Returns false when the system is numerically singular.
bool newton_direction(std::vector<Vector> h, const Vector& g, Vector& d) {
  const std::size_t k = g.size();
  for (std::size_t i = 0; i < k; ++i) h[i][i] += kLevenberg;
  Vector rhs(k);
  for (std::size_t i = 0; i < k; ++i) rhs[i] = -g[i];
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(h[r][col]) > std::abs(h[pivot][col])) pivot = r;
    }
    if (!(std::abs(h[pivot][col]) > 0.0)) return false;
    std::swap(h[pivot], h[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = h[r][col] / h[col][col];
      for (std::size_t c = col; c < k; ++c) h[r][c] -= f * h[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  d.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double v = rhs[i];
    for (std::size_t c = i + 1; c < k; ++c) v -= h[i][c] * d[c];
    d[i] = v / h[i][i];
  }
  for (double v : d) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Hessian with respect to the rescaled coordinates u = m w.
std::vector<Vector> fd_hessian(const Objective& f, const Vector& w, const Vector& m) {
  const std::size_t k = w.size();
  std::vector<Vector> h(k, Vector(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(m[j] * w[j])) / m[j];
    Vector plus = w;
    Vector minus = w;
    plus[j] += step;
    minus[j] -= step;
    const Vector gp = f(plus).gradient;
    const Vector gm = f(minus).gradient;
    for (std::size_t i = 0; i < k; ++i) {
      h[i][j] = (gp[i] - gm[i]) / (m[j] * (plus[j] - minus[j])) / m[i];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double avg = 0.5 * (h[i][j] + h[j][i]);
      h[i][j] = avg;
      h[j][i] = avg;
    }
  }
  return h;
}

// Gradient descent, optionally followed by damped Newton. Stops when the
// certificate drops to the tolerance or the iteration budget runs out.
void smooth_solve(const Objective& f, const Vector& m, const SolverConfig& cfg, bool use_newton,
                  State& s, std::size_t& iterations, bool& converged, bool& used_newton) {
  double gd_step = 1.0;
  std::size_t gd_iterations = 0;
  while (iterations < cfg.max_iterations) {
    if (s.norm <= cfg.tolerance) {
      converged = true;
      return;
    }
    if (use_newton && (s.norm <= kNewtonSwitch || gd_iterations >= kNewtonSwitchIterations)) break;
    ++iterations;
    ++gd_iterations;
    double step = std::min(gd_step * 2.0, 1e12);
    if (!line_search(f, m, cfg, s, scaled_descent(s.eval.gradient, m), step)) return;
    gd_step = step;
  }
  if (!use_newton) return;
  used_newton = true;
  while (iterations < cfg.max_iterations) {
    if (s.norm <= cfg.tolerance) {
      converged = true;
      return;
    }
    ++iterations;
    Vector gu(s.w.size());
    for (std::size_t i = 0; i < gu.size(); ++i) gu[i] = s.eval.gradient[i] / m[i];
    Vector d;
    double step = 1.0;
    if (newton_direction(fd_hessian(f, s.w, m), gu, d)) {
      for (std::size_t i = 0; i < d.size(); ++i) d[i] /= m[i];
      if (line_search(f, m, cfg, s, d, step)) continue;
    }
    step = std::min(gd_step * 2.0, 1e12);
    if (!line_search(f, m, cfg, s, scaled_descent(s.eval.gradient, m), step)) return;
    gd_step = step;
  }
  converged = s.norm <= cfg.tolerance;
}

void check_uniqueness(const Criterion& c) {
  if (!c.is_dropout()) return;
  const bool unique = c.is_reduced() ? has_unique_dropout_minimizer(c.exchangeable())
                                     : has_unique_dropout_minimizer(c.discrete());
  if (!unique) {
    throw NoUniqueMinimizerError(
        "dropout criterion has no unique minimizer: a feature is perfect modulo ties");
  }
}

double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

// ||w - prox(w - grad f(w))||_inf with unit step.
double prox_residual(const Vector& w, const Vector& g, double lambda) {
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r = std::max(r, std::abs(w[i] - soft_threshold(w[i] - g[i], lambda)));
  }
  return r;
}

OptimizationResult minimize_l1(const Criterion& c, const SolverConfig& cfg, Vector w) {
  const DiscreteSource& src = c.discrete();
  const double lambda = c.lambda();
  const Vector m = coordinate_scales(c);
  const std::size_t n = w.size();
  auto smooth = [&](const Vector& x) { return Evaluation{plain_risk(src, x), plain_risk_gradient(src, x)}; };
  auto full_value = [&](const Vector& x) { return l1_criterion(src, lambda, x); };

  OptimizationResult result;
  result.method = "proximal-gradient";
  Evaluation e = smooth(w);
  double residual = prox_residual(w, e.gradient, lambda);
  double step = 1.0;
  std::size_t iterations = 0;
  bool polished = false;

  // Newton on the current support with signs frozen; kept only if it leaves
  // the support and signs intact and lowers the residual.
  auto polish = [&]() {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] != 0.0) support.push_back(i);
    }
    if (support.empty() || support.size() > 2) return;
    auto embed = [&](const Vector& v) {
      Vector full(n, 0.0);
      for (std::size_t k = 0; k < support.size(); ++k) full[support[k]] = v[k];
      return full;
    };
    Vector signs(support.size());
    Vector sub(support.size());
    Vector sub_m(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
      sub[k] = w[support[k]];
      signs[k] = w[support[k]] > 0.0 ? 1.0 : -1.0;
      sub_m[k] = m[support[k]];
    }
    Objective restricted = [&](const Vector& v) {
      const Vector full = embed(v);
      Evaluation r = smooth(full);
      Evaluation out;
      out.value = r.value;
      out.gradient.resize(support.size());
      for (std::size_t k = 0; k < support.size(); ++k) {
        out.value += lambda * signs[k] * v[k];
        out.gradient[k] = r.gradient[support[k]] + lambda * signs[k];
      }
      return out;
    };
    State s{sub, restricted(sub), 0.0};
    s.norm = certificate(s.eval.gradient, sub_m);
    SolverConfig sub_cfg = cfg;
    sub_cfg.max_iterations = std::min<std::size_t>(cfg.max_iterations, 500);
    std::size_t sub_iterations = 0;
    bool sub_converged = false;
    bool used_newton = false;
    smooth_solve(restricted, sub_m, sub_cfg, true, s, sub_iterations, sub_converged, used_newton);
    iterations += sub_iterations;
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (!(s.w[k] * signs[k] > 0.0)) return;
    }
    const Vector candidate = embed(s.w);
    const Evaluation ce = smooth(candidate);
    const double cr = prox_residual(candidate, ce.gradient, lambda);
    if (cr < residual) {
      w = candidate;
      e = ce;
      residual = cr;
      polished = true;
    }
  };

  bool tried_polish = false;
  while (residual > cfg.tolerance && iterations < cfg.max_iterations) {
    if (!tried_polish && residual <= 1e-7) {
      tried_polish = true;
      polish();
      continue;
    }
    ++iterations;
    // Proximal step in rescaled coordinates u = m w.
    double t = std::min(step * 2.0, 1e12);
    bool accepted = false;
    for (; t >= kMinStep; t *= cfg.shrink) {
      Vector trial(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = m[i] * w[i] - t * e.gradient[i] / m[i];
        trial[i] = soft_threshold(u, lambda * t / m[i]) / m[i];
      }
      const Evaluation te = smooth(trial);
      double lin = 0.0;
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dw = trial[i] - w[i];
        lin += e.gradient[i] * dw;
        quad += (m[i] * dw) * (m[i] * dw);
      }
      const double slack = 8.0 * kEpsilon * std::max(1.0, std::abs(e.value));
      if (te.value <= e.value + lin + quad / (2.0 * t) + slack) {
        w = trial;
        e = te;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    step = t;
    residual = prox_residual(w, e.gradient, lambda);
  }
  if (residual > cfg.tolerance && !tried_polish) polish();

  result.minimizer = w;
  result.value = full_value(w);
  result.grad_norm = residual;
  result.iterations = iterations;
  result.converged = residual <= cfg.tolerance;
  if (polished) result.method += "+newton";
  return result;
}

}  // namespace

OptimizationResult minimize(const Criterion& c, const SolverConfig& cfg) {
  cfg.validate();
  check_uniqueness(c);
  const std::size_t dim = c.dimension();
  Vector w = cfg.initial_point.empty() ? Vector(dim, 0.0) : cfg.initial_point;
  if (w.size() != dim) throw std::invalid_argument("SolverConfig: initial point has wrong dimension");

  if (c.kind() == CriterionKind::L1) return minimize_l1(c, cfg, std::move(w));

  const Vector m = coordinate_scales(c);
  Objective f = [&c](const Vector& x) { return criterion_evaluate(c, x); };
  State s{w, f(w), 0.0};
  s.norm = certificate(s.eval.gradient, m);
  const bool use_newton = dim <= 2 && c.kind() != CriterionKind::Plain;
  std::size_t iterations = 0;
  bool converged = false;
  bool used_newton = false;
  smooth_solve(f, m, cfg, use_newton, s, iterations, converged, used_newton);

  OptimizationResult result;
  result.minimizer = s.w;
  result.value = s.eval.value;
  result.grad_norm = s.norm;
  result.iterations = iterations;
  result.converged = converged;
  result.method = used_newton ? "gradient-descent+newton" : "gradient-descent";
  return result;
}

WeightVector finite_difference_gradient(const Criterion& c, const WeightVector& w, double h) {
  WeightVector g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(w[i]));
    WeightVector plus = w;
    WeightVector minus = w;
    plus[i] += step;
    minus[i] -= step;
    g[i] = (criterion_value(c, plus) - criterion_value(c, minus)) / (plus[i] - minus[i]);
  }
  return g;
}

std::vector<RayGradient> gradient_sign_scan(const Criterion& c, const Ray& ray,
                                            const std::vector<double>& grid) {
  std::vector<RayGradient> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back({t, criterion_gradient(c, ray.at(t))});
  return out;
}

}  // namespace dropoutlab
