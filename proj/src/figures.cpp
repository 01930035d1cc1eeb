#include "dropoutlab/figures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dropoutlab/serialize.hpp"

namespace dropoutlab {

namespace {

struct Inequality {
  std::string text;
  double a = 0.0;
  double b = 0.0;

  bool holds(const Vector& w) const { return a * w[0] + b * w[1] > 0.0; }
};

class FigureWriter {
 public:
  FigureWriter(std::string id, std::filesystem::path dir) : id_(std::move(id)), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    sidecar_["figure"] = id_;
    sidecar_["panels"] = Json::array();
  }

  void table(const std::string& panel, const CsvTable& t) {
    const std::string name = id_ + "_" + panel + ".csv";
    std::ofstream out(dir_ / name);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    write_csv(out, t);
    files_.push_back(name);
    sidecar_["panels"].push_back(name);
  }

  void grid(const std::string& panel, const Grid& g) { table(panel, grid_to_csv(g)); }

  Json& sidecar() { return sidecar_; }

  std::vector<std::string> finish() {
    const std::string name = id_ + ".json";
    std::ofstream out(dir_ / name);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << sidecar_.dump(2) << '\n';
    files_.push_back(name);
    return files_;
  }

 private:
  std::string id_;
  std::filesystem::path dir_;
  Json sidecar_;
  std::vector<std::string> files_;
};

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

Json window_json(const Window& w) {
  return {{"w1", {w.x_min, w.x_max}}, {"w2", {w.y_min, w.y_max}}};
}

Json region_json(const std::vector<Inequality>& region) {
  Json a = Json::array();
  for (const auto& r : region) a.push_back(r.text);
  return a;
}

bool in_region(const std::vector<Inequality>& region, const Vector& w) {
  return std::all_of(region.begin(), region.end(), [&](const Inequality& r) { return r.holds(w); });
}

Json marker_json(const OptimizationResult& r, double error, const std::vector<Inequality>& region) {
  return {{"minimizer", vector_json(r.minimizer)},
          {"converged", r.converged},
          {"error", error},
          {"in_bayes_region", in_region(region, r.minimizer)}};
}

const std::vector<Inequality> kP5Region = {
    {"10*w1 - w2 > 0", 10.0, -1.0}, {"1.1*w1 - w2 > 0", 1.1, -1.0}, {"-w1 + 1.1*w2 > 0", -1.0, 1.1}};
const std::vector<Inequality> kP6Region = {
    {"w1 > 0", 1.0, 0.0}, {"-w1/1000 + w2 > 0", -1.0 / 1000.0, 1.0}, {"w1/10 - w2 > 0", 1.0 / 10.0, -1.0}};
const std::vector<Inequality> kP7Region = {{"w2 - w1 > 0", -1.0, 1.0}, {"w2 + w1 > 0", 1.0, 1.0}};

const Window kDefaultWindow{-3.0, 5.0, -3.0, 5.0};

std::vector<std::string> fig1(const std::filesystem::path& dir, const FigureOptions& opt) {
  FigureWriter fw("fig1", dir);
  const DiscreteSource src = point_mass({1.0, 1.0});
  const DropoutConfig cfg{opt.q};
  const std::vector<double> w1 = linspace(-10.0, 10.0, 401);

  CsvTable left{{"w1", "reg", "taylor"}, {}};
  double sup = 0.0;
  for (double v : w1) {
    const double reg = dropout_regularizer(src, cfg, {v, 0.0});
    sup = std::max(sup, reg);
    left.rows.push_back({v, reg, taylor_regularizer(src, cfg, {v, 0.0})});
  }
  fw.table("left", left);

  const std::vector<double> seconds = {0.0, 1.0, 2.0, 4.0};
  CsvTable right{{"w1"}, {}};
  for (double s : seconds) right.header.push_back("reg_w2_" + format_number(s));
  for (double v : w1) {
    std::vector<double> row{v};
    for (double s : seconds) row.push_back(dropout_regularizer(src, cfg, {v, s}));
    right.rows.push_back(std::move(row));
  }
  fw.table("right", right);

  Json& side = fw.sidecar();
  side["source"] = to_json(src);
  side["q"] = opt.q;
  side["window"] = {{"w1", {-10.0, 10.0}}};
  side["second_weights"] = seconds;
  side["left_sup_reg"] = sup;
  side["single_weight_limit"] = cfg.q() * std::numbers::ln2;
  return fw.finish();
}

// Risk, regularizer, L2 and dropout panels for a two-feature source.
std::vector<std::string> two_feature_figure(const std::string& id, const DiscreteSource& src,
                                            const std::vector<Inequality>& region, bool wide_panel,
                                            const std::filesystem::path& dir, const FigureOptions& opt) {
  FigureWriter fw(id, dir);
  const double lambda = opt.lambda.value_or(0.01);
  const DropoutConfig cfg{opt.q};
  const Resolution res{opt.resolution, opt.resolution};
  SolverConfig sc;
  sc.tolerance = opt.tolerance;

  fw.grid("risk", grid_scan(Criterion::plain(src), kDefaultWindow, res));
  fw.grid("reg", grid_scan([&](double a, double b) { return dropout_regularizer(src, cfg, {a, b}); },
                           kDefaultWindow, res));
  const Criterion l2 = Criterion::l2(src, lambda);
  const Criterion dropout = Criterion::dropout_nu(src, opt.q);
  fw.grid("l2", grid_scan(l2, kDefaultWindow, res));
  fw.grid("dropout", grid_scan(dropout, kDefaultWindow, res));

  const OptimizationResult l2_min = minimize(l2, sc);
  const OptimizationResult dropout_min = minimize(dropout, sc);
  Window wide = kDefaultWindow;
  if (wide_panel) {
    wide.x_max = std::max(kDefaultWindow.x_max, 1.5 * dropout_min.minimizer[0]);
    wide.y_max = std::max(kDefaultWindow.y_max, 1.5 * dropout_min.minimizer[1]);
    fw.grid("dropout_wide", grid_scan(dropout, wide, res));
  }

  Json& side = fw.sidecar();
  side["source"] = to_json(src);
  side["q"] = opt.q;
  side["lambda"] = lambda;
  side["window"] = window_json(kDefaultWindow);
  if (wide_panel) side["wide_window"] = window_json(wide);
  side["bayes_region"] = region_json(region);
  side["minimizers"] = {{"l2", marker_json(l2_min, zero_one_error(src, l2_min.minimizer), region)},
                        {"dropout", marker_json(dropout_min, zero_one_error(src, dropout_min.minimizer), region)}};
  return fw.finish();
}

std::vector<std::string> fig4(const std::filesystem::path& dir, const FigureOptions& opt) {
  FigureWriter fw("fig4", dir);
  const std::size_t n = 4;
  const ExchangeableSource src = build_p7(n);
  const double lambda = opt.lambda.value_or(1.0 / (30.0 * static_cast<double>(n)));
  const Resolution res{opt.resolution, opt.resolution};
  SolverConfig sc;
  sc.tolerance = opt.tolerance;
  const Criterion dropout = Criterion::reduced_dropout(src, opt.q);
  const Criterion l2 = Criterion::reduced_l2(src, lambda);
  fw.grid("dropout", grid_scan(dropout, kDefaultWindow, res));
  fw.grid("l2", grid_scan(l2, kDefaultWindow, res));

  const OptimizationResult dropout_min = minimize(dropout, sc);
  const OptimizationResult l2_min = minimize(l2, sc);
  auto er = [&](const OptimizationResult& r) {
    return zero_one_error_reduced(src, {r.minimizer[0], r.minimizer[1]});
  };
  const double a = 2.0 * std::numbers::ln2;
  const Vector diag_grad = criterion_gradient(dropout, {a, a});

  Json& side = fw.sidecar();
  side["source"] = to_json(src);
  side["q"] = opt.q;
  side["lambda"] = lambda;
  side["window"] = window_json(kDefaultWindow);
  side["bayes_region"] = region_json(kP7Region);
  side["minimizers"] = {{"reduced_l2", marker_json(l2_min, er(l2_min), kP7Region)},
                        {"reduced_dropout", marker_json(dropout_min, er(dropout_min), kP7Region)}};
  side["diagonal_point"] = {{"w", {a, a}}, {"dropout_gradient", vector_json(diag_grad)}};
  return fw.finish();
}

std::vector<std::string> fig5(const std::filesystem::path& dir, const FigureOptions& opt) {
  FigureWriter fw("fig5", dir);
  const double lambda = opt.lambda.value_or(0.01);
  const Resolution res{opt.resolution, opt.resolution};
  SolverConfig sc;
  sc.tolerance = opt.tolerance;
  Json markers = Json::object();
  const std::pair<std::string, DiscreteSource> sources[2] = {{"p5", build_p5()}, {"p6", build_p6()}};
  const std::vector<Inequality>* regions[2] = {&kP5Region, &kP6Region};
  Json bayes = Json::object();
  for (int k = 0; k < 2; ++k) {
    const auto& [name, src] = sources[k];
    const Criterion l1 = Criterion::l1(src, lambda);
    fw.grid(name, grid_scan(l1, kDefaultWindow, res));
    const OptimizationResult m = minimize(l1, sc);
    markers[name] = marker_json(m, zero_one_error(src, m.minimizer), *regions[k]);
    bayes[name] = region_json(*regions[k]);
  }
  Json& side = fw.sidecar();
  side["lambda"] = lambda;
  side["window"] = window_json(kDefaultWindow);
  side["bayes_region"] = bayes;
  side["minimizers"] = markers;
  return fw.finish();
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4", "fig5"};
  return ids;
}

std::vector<std::string> write_figure(const std::string& id, const std::filesystem::path& out_dir,
                                      const FigureOptions& options) {
  if (options.resolution < 2) throw std::invalid_argument("figure resolution must be >= 2");
  if (id == "fig1") return fig1(out_dir, options);
  if (id == "fig2") return two_feature_figure("fig2", build_p5(), kP5Region, false, out_dir, options);
  if (id == "fig3") return two_feature_figure("fig3", build_p6(), kP6Region, true, out_dir, options);
  if (id == "fig4") return fig4(out_dir, options);
  if (id == "fig5") return fig5(out_dir, options);
  throw std::invalid_argument("unknown figure id '" + id + "'");
}

}  // namespace dropoutlab
