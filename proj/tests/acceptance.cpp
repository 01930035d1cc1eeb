// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "dropoutlab/analysis.hpp"
#include "dropoutlab/dropout.hpp"
#include "dropoutlab/errors.hpp"
#include "oracles.hpp"

using namespace dropoutlab;
namespace fs = std::filesystem;

namespace {

const double kLn2 = std::log(2.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Vector random_w(std::mt19937_64& rng, std::size_t n, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector w(n);
  for (auto& v : w) v = u(rng);
  return w;
}

double reg(const DiscreteSource& s, const Vector& w) { return dropout_regularizer(s, DropoutConfig{0.5}, w); }

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const DropoutConfig cfg{0.5};
  double worst_decomp = 0.0;
  double worst_equiv = 0.0;
  for (const auto& src : {build_p5(), build_p6(), expand(build_p7(4))}) {
    for (int t = 0; t < 200; ++t) {
      const Vector w = random_w(rng, src.dimension(), 5.0);
      const double j = dropout_criterion_nu(src, cfg, w);
      const double decomposed = plain_risk(src, w) + dropout_regularizer_label_free(src, cfg, w);
      Vector scaled = w;
      for (auto& v : scaled) v /= cfg.p();
      worst_decomp = std::max(worst_decomp, std::abs(j - decomposed));
      worst_equiv = std::max(worst_equiv, std::abs(j - dropout_criterion_r(src, cfg, scaled)));
    }
  }
  o.require(worst_decomp <= 1e-10, "decomposition gap " + num(worst_decomp));
  o.require(worst_equiv <= 1e-10, "form gap " + num(worst_equiv));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("max gaps ") + num(worst_decomp) + ", " + num(worst_equiv);
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(77);
  const std::vector<Criterion> kinds = {
      Criterion::plain(build_p6()),
      Criterion::dropout_nu(build_p5(), 0.5),
      Criterion::dropout_r(build_p6(), 0.5),
      Criterion::l2(build_p5(), 0.01),
      Criterion::reduced_dropout(build_p7(8), 0.5),
      Criterion::reduced_l2(build_p7(8), 1.0 / 240),
  };
  double worst = 0.0;
  for (const auto& c : kinds) {
    for (int t = 0; t < 100; ++t) {
      const Vector w = random_w(rng, c.dimension(), 3.0);
      const Vector g = criterion_gradient(c, w);
      const Vector fd = finite_difference_gradient(c, w);
      double diff = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        diff = std::max(diff, std::abs(g[i] - fd[i]));
        scale = std::max(scale, std::abs(g[i]));
      }
      worst = std::max(worst, diff / scale);
    }
  }
  o.require(worst <= 1e-6, "relative gap " + num(worst));
  if (o.pass) o.detail = "max relative gap " + num(worst);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto unit = point_mass({1.0, 1.0});
  const double at60 = reg(unit, {60.0, 0.0});
  o.require(std::abs(at60 - 0.5 * kLn2) <= 1e-6, "(a) limit " + num(at60));
  double sup = 0.0;
  for (int k = 0; k <= 600; ++k) sup = std::max(sup, reg(unit, {0.1 * k, 0.0}));
  o.require(sup <= 0.5 * kLn2, "(a) grid sup " + num(sup));

  const double diag = reg(unit, {60.0, 60.0});
  o.require(std::abs(diag - 0.25 * kLn2) <= 1e-6, "(b) limit " + num(diag));

  double best = 0.0;
  for (double w = 1.0; w <= 200.0; w += 1.0) best = std::max(best, reg(unit, {w, -w}));
  o.require(best >= 10.0, "(c) max reg(w,-w) " + num(best));

  const auto twos = point_mass({2.0, 2.0});
  const DropoutConfig half{0.5};
  o.require(reg(twos, {0.05, 1.0}) < reg(twos, {0.0, 1.0}), "(d) not decreasing");
  const double slope =
      dropout_criterion_nu_eval(twos, half, {0.0, 1.0}).gradient[0] - plain_risk_gradient(twos, {0.0, 1.0})[0];
  o.require(std::abs(slope - oracle::nonmonotone_slope(1.0)) <= 1e-10,
            "(d) slope " + num(slope) + " vs " + num(oracle::nonmonotone_slope(1.0)));

  // Largest midpoint-convexity violation over pairs of points on the segment.
  const auto on_segment = [](double t) { return Vector{60.0 * (1.0 - t), 60.0 * t}; };
  const int steps = 200;
  std::vector<double> values(steps + 1);
  for (int k = 0; k <= steps; ++k) values[k] = reg(unit, on_segment(static_cast<double>(k) / steps));
  double gap = -1e300;
  for (int a = 0; a <= steps; ++a) {
    for (int b = a + 2; b <= steps; b += 2) gap = std::max(gap, values[(a + b) / 2] - 0.5 * (values[a] + values[b]));
  }
  o.require(gap > 0.01, "(e) largest midpoint gap on (60,0)-(0,60) is " + num(gap));
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const auto& [name, src] : {std::pair{"P5", build_p5()}, std::pair{"P6", build_p6()}}) {
    const auto r = minimize(Criterion::dropout_nu(src, 0.5));
    const double v = reg(src, r.minimizer);
    o.require(r.converged, std::string(name) + " not converged");
    o.require(v <= kLn2 - 1e-9, std::string(name) + " reg " + num(v));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string(name) + " reg(w*) " + num(v);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (auto [q, lambda] : {std::pair{0.5, 0.01}, std::pair{1.0 / 3.0, 1.0 / 50}}) {
    const auto r = run_separation_2d(q, lambda);
    const std::string tag = "q=" + num(q) + " ";
    o.require(r.er_reg_p == 0.0, tag + "er_l2(P5) " + num(r.er_reg_p));
    o.require(r.er_dropout_p == 1.0 / 3.0, tag + "er_dropout(P5) " + num(r.er_dropout_p));
    o.require(r.er_reg_q == 1.0 / 7.0, tag + "er_l2(P6) " + num(r.er_reg_q));
    o.require(r.er_dropout_q == 0.0, tag + "er_dropout(P6) " + num(r.er_dropout_q));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto r = run_separation_l1(0.01);
  o.require(r.er_reg_p == 0.0, "er_l1(P5) " + num(r.er_reg_p));
  o.require(r.er_reg_q == 1.0 / 7.0, "er_l1(P6) " + num(r.er_reg_q));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto r4 = run_separation_highdim(4, 0.5, 1.0 / 120);
  o.require(r4.er_reg_p == 0.0, "er_l2(P7,n=4) " + num(r4.er_reg_p));
  for (std::size_t n : {4u, 126u}) {
    const auto c = Criterion::reduced_dropout(build_p7(n), 0.5);
    const auto res = minimize(c);
    const double er = zero_one_error_reduced(build_p7(n), {res.minimizer[0], res.minimizer[1]});
    o.require(res.converged, "n=" + std::to_string(n) + " not converged");
    o.require(er >= 0.1 - 1e-15 && std::abs(er - 0.1) <= 1e-15, "er_dropout(n=" + std::to_string(n) + ") " + num(er));
  }
  std::mt19937_64 rng(5);
  double twelve = 0.0;
  double expansion = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Vector w = random_w(rng, 2, 5.0);
    twelve = std::max(twelve, std::abs(reduced_dropout_criterion(build_p7(4), DropoutConfig{0.5}, {w[0], w[1]}) -
                                       oracle::k_twelve(w[0], w[1])));
  }
  for (std::size_t n : {4u, 6u, 8u}) {
    const auto full = expand(build_p7(n));
    for (int t = 0; t < 50; ++t) {
      const Vector w = random_w(rng, 2, 4.0);
      const double a = reduced_dropout_criterion(build_p7(n), DropoutConfig{0.5}, {w[0], w[1]});
      const double b = dropout_criterion_r(full, DropoutConfig{0.5}, full_weights({w[0], w[1]}, n));
      expansion = std::max(expansion, std::abs(a - b));
    }
  }
  o.require(twelve <= 1e-12, "twelve-term gap " + num(twelve));
  o.require(expansion <= 1e-10, "expansion gap " + num(expansion));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const double slud = slud_probability(100, 1.0 / (10.0 * std::sqrt(99.0)));
  o.require(slud >= 0.3, "(a) " + num(slud));
  const double hump = hump_probability(300, 1.0 / (10.0 * std::sqrt(299.0)));
  o.require(hump >= 1.0 / 13.0, "(b) " + num(hump));

  {
    const std::size_t n = 300;
    const double lambda = 1.0 / 9000.0;
    const double beta = p8_default_beta(n);
    const double alpha = beta * lambda / 2.0;
    for (double eta : {0.0, 0.01}) {
      const auto c = Criterion::reduced_l2(build_p8(n, eta, alpha, beta), lambda);
      const auto r = minimize(c);
      const double er = zero_one_error_reduced(c.exchangeable(), {r.minimizer[0], r.minimizer[1]});
      o.require(r.converged && er >= 0.3, "(c) eta=" + num(eta) + " er " + num(er));
    }
  }

  const std::size_t n = 100;
  const double nn = static_cast<double>(n);
  const double m = nn - 1.0;
  const double alpha = 1.0 / (300.0 * nn * std::sqrt(nn));
  const double beta = p8_default_beta(n);
  const EtaDerivation d = derive_feasible_eta(n, 0.5, alpha, beta);
  o.require(d.solve.converged && std::abs(d.er_dropout - d.eta) <= 1e-12,
            "(d) derived eta " + num(d.eta) + " er " + num(d.er_dropout));

  // Walk eta geometrically from the derived value down to the literal one.
  const double literal = p8_literal_eta(n);
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(27.0 / std::sqrt(m) * k / 21.0);
  const int legs = 16;
  double largest_negative = 0.0;
  for (int s = 0; s <= legs; ++s) {
    const double eta = std::exp(std::log(d.eta) + (std::log(literal) - std::log(d.eta)) * s / legs);
    const auto c = Criterion::reduced_dropout(build_p8(n, eta, alpha, beta), 0.5);
    double worst = -1e300;
    for (const auto& g : gradient_sign_scan(c, Ray{{0.0, 0.0}, {m / alpha, 1.0}}, grid)) worst = std::max(worst, g.gradient[0]);
    // Only the literal regime is asserted; the walk reports where the sign holds.
    if (s == legs) o.require(worst < 0.0, "(d) ray sign at literal eta " + num(worst));
    if (worst < 0.0 && eta > largest_negative) largest_negative = eta;
    if (s == legs) o.detail += (o.detail.empty() ? "" : "; ") + ("literal eta max dK/dw1 " + num(worst));
  }
  o.detail += "; derived eta " + num(d.eta) + "; largest walked eta with negative ray slope " + num(largest_negative);
  return o;
}

Outcome criterion9() {
  Outcome o;
  bool threw = false;
  try {
    minimize(Criterion::dropout_nu(point_mass({1.0, 1.0}), 0.5));
  } catch (const NoUniqueMinimizerError&) {
    threw = true;
  }
  o.require(threw, "single atom did not raise");
  o.require(has_unique_dropout_minimizer(build_p5()), "P5 predicate");
  o.require(has_unique_dropout_minimizer(build_p6()), "P6 predicate");
  o.require(has_unique_dropout_minimizer(expand(build_p7(4))), "P7 predicate");
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  Outcome o;
  const auto a = cli::run("verify");
  const auto b = cli::run("verify");
  o.require(a.status == 0 && b.status == 0, "verify exit status");
  o.require(!a.out.empty() && a.out == b.out, "verify reports differ");

  const fs::path base = fs::temp_directory_path() / "dropoutlab_acceptance";
  fs::remove_all(base);
  for (const char* run : {"one", "two"}) {
    const auto r = cli::run("figure fig2 --out " + (base / run).string());
    o.require(r.status == 0, std::string("figure run ") + run);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "one")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    o.require(slurp(entry.path()) == slurp(base / "two" / entry.path().filename()),
              entry.path().filename().string() + " differs");
  }
  o.require(compared == 4, "expected 4 CSVs, found " + std::to_string(compared));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 decomposition and form identities", criterion1},
      {"2 analytic vs finite-difference gradients", criterion2},
      {"3 regularizer geometry", criterion3},
      {"4 reg at dropout minimizers below ln 2", criterion4},
      {"5 two-dimensional separation", criterion5},
      {"6 L1 separation", criterion6},
      {"7 many-feature source", criterion7},
      {"8 label-symmetric source", criterion8},
      {"9 uniqueness predicate", criterion9},
      {"10 determinism", criterion10},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %s%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.empty() ? "" : " :: ",
                o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
