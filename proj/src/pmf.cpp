#include "dropoutlab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dropoutlab {

Pmf Pmf::from_masses(std::vector<PmfEntry> masses) {
  std::stable_sort(masses.begin(), masses.end(),
                   [](const PmfEntry& a, const PmfEntry& b) { return a.value < b.value; });
  Pmf out;
  double total = 0.0;
  for (const auto& m : masses) {
    if (m.prob < 0.0 || !std::isfinite(m.prob) || !std::isfinite(m.value)) {
      throw std::invalid_argument("Pmf: negative or non-finite mass");
    }
    total += m.prob;
    if (m.prob == 0.0) continue;
    if (!out.support_.empty() && out.support_.back().value == m.value) {
      out.support_.back().prob += m.prob;
    } else {
      out.support_.push_back(m);
    }
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw std::logic_error("Pmf: masses sum to " + std::to_string(total));
  }
  for (auto& e : out.support_) e.prob /= total;
  return out;
}

Pmf Pmf::delta(double value) { return from_masses({{value, 1.0}}); }

double Pmf::total() const {
  double t = 0.0;
  for (const auto& e : support_) t += e.prob;
  return t;
}

double Pmf::mean() const {
  double m = 0.0;
  for (const auto& e : support_) m += e.prob * e.value;
  return m;
}

double Pmf::prob_of(double value) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), value,
                             [](const PmfEntry& e, double v) { return e.value < v; });
  if (it != support_.end() && it->value == value) return it->prob;
  return 0.0;
}

Pmf IntegerPmf::to_pmf() const {
  std::vector<PmfEntry> masses;
  masses.reserve(prob.size());
  for (std::size_t k = 0; k < prob.size(); ++k) {
    masses.push_back({static_cast<double>(offset + static_cast<long>(k)), prob[k]});
  }
  return Pmf::from_masses(std::move(masses));
}

IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b) {
  IntegerPmf out;
  out.offset = a.offset + b.offset;
  out.prob.assign(a.prob.size() + b.prob.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.prob.size(); ++i) {
    if (a.prob[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.prob.size(); ++j) out.prob[i + j] += a.prob[i] * b.prob[j];
  }
  return out;
}

IntegerPmf binomial_pmf(std::size_t trials, double success) {
  IntegerPmf out;
  out.prob.assign(trials + 1, 0.0);
  out.prob[0] = 1.0;
  const double failure = 1.0 - success;
  for (std::size_t t = 1; t <= trials; ++t) {
    for (std::size_t k = t; k > 0; --k) out.prob[k] = out.prob[k] * failure + out.prob[k - 1] * success;
    out.prob[0] *= failure;
  }
  return out;
}

}  // namespace dropoutlab
