// Command-line front end: verification suite, figure data, single solves,
// separation experiments and grid scans.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dropoutlab/errors.hpp"
#include "dropoutlab/figures.hpp"
#include "dropoutlab/serialize.hpp"

namespace dl = dropoutlab;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// Raised for bad flags or specs discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<double> q;
  std::optional<double> lambda;
  std::optional<std::size_t> n;
  std::optional<double> eta;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::string out;
  std::vector<std::string> only;
  std::string json;
  std::string figure_id;
  std::string pair;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

dl::Json load_spec(const std::string& text) {
  if (text.empty()) throw UsageError("--json is required");
  std::string body = text;
  if (text.front() != '{') {
    std::ifstream in(text);
    if (!in) throw UsageError("cannot read spec file " + text);
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return dl::Json::parse(body);
  } catch (const dl::Json::exception& e) {
    throw UsageError(std::string("malformed JSON spec: ") + e.what());
  }
}

dl::SolverConfig solver_config(const Options& o, const dl::Json* spec) {
  dl::SolverConfig cfg;
  try {
    if (spec != nullptr && spec->contains("solver")) cfg = dl::solver_config_from_json(spec->at("solver"));
    if (o.tol) cfg.tolerance = *o.tol;
    if (o.max_iters) cfg.max_iterations = *o.max_iters;
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_verify(const Options& o) {
  std::vector<dl::TheoremCheckResult> results;
  try {
    results = dl::run_verify_suite(o.only);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const dl::Json report = dl::verify_report_json(results);
  emit(report.dump(2) + "\n", o.out);
  for (const auto& r : results) {
    if (!r.passed) std::cerr << "FAILED " << r.id << "\n";
  }
  return report.at("all_passed").get<bool>() ? kOk : kFailed;
}

int cmd_figure(const Options& o) {
  const auto& ids = dl::figure_ids();
  if (std::find(ids.begin(), ids.end(), o.figure_id) == ids.end()) {
    throw UsageError("unknown figure id '" + o.figure_id + "'");
  }
  dl::FigureOptions fo;
  if (o.q) fo.q = *o.q;
  fo.lambda = o.lambda;
  if (o.tol) fo.tolerance = *o.tol;
  const std::string dir = o.out.empty() ? "." : o.out;
  for (const auto& f : dl::write_figure(o.figure_id, dir, fo)) std::cout << dir << "/" << f << "\n";
  return kOk;
}

int cmd_optimize(const Options& o) {
  const dl::Json spec = load_spec(o.json);
  const dl::SolverConfig cfg = solver_config(o, &spec);
  std::optional<dl::Criterion> criterion;
  try {
    const dl::SourceVariant source = dl::source_from_json(spec.at("source"));
    criterion.emplace(dl::criterion_from_json(spec.at("criterion"), source));
  } catch (const dl::Json::exception& e) {
    throw UsageError(std::string("malformed spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const dl::OptimizationResult r = dl::minimize(*criterion, cfg);
  dl::Json out = {{"criterion", dl::criterion_spec_json(*criterion)}, {"result", dl::to_json(r)}};
  if (const auto* d = std::get_if<dl::DiscreteSource>(&criterion->source())) {
    out["error"] = dl::zero_one_error(*d, r.minimizer);
  } else {
    out["error"] = dl::zero_one_error_reduced(criterion->exchangeable(), {r.minimizer[0], r.minimizer[1]});
  }
  emit(out.dump(2) + "\n", o.out);
  return r.converged ? kOk : kFailed;
}

int cmd_separate(const Options& o) {
  const dl::SolverConfig cfg = solver_config(o, nullptr);
  dl::SeparationReport rep;
  if (o.pair == "2d") {
    rep = dl::run_separation_2d(o.q.value_or(0.5), o.lambda.value_or(0.01), cfg);
  } else if (o.pair == "l1") {
    rep = dl::run_separation_l1(o.lambda.value_or(0.01), o.q.value_or(0.5), cfg);
  } else if (o.pair == "highdim") {
    const std::size_t n = o.n.value_or(4);
    if (n < 4 || n % 2 != 0) throw UsageError("--n must be even and >= 4");
    dl::P8Params params{o.eta, o.alpha, o.beta};
    const double lambda = o.lambda.value_or(1.0 / (30.0 * static_cast<double>(n)));
    rep = dl::run_separation_highdim(n, o.q.value_or(0.5), lambda, params, cfg);
  } else {
    throw UsageError("unknown pair '" + o.pair + "' (expected 2d, highdim or l1)");
  }
  emit(dl::to_json(rep).dump(2) + "\n", o.out);
  for (const auto& s : rep.solves) {
    if (!s.result.converged) return kFailed;
  }
  return kOk;
}

int cmd_scan(const Options& o) {
  const dl::Json spec = load_spec(o.json);
  dl::Grid grid;
  try {
    const dl::SourceVariant source = dl::source_from_json(spec.at("source"));
    const dl::Json& w = spec.at("window");
    const dl::Window window{w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                            w.at(3).get<double>()};
    dl::Resolution res{81, 81};
    if (spec.contains("resolution")) {
      res = {spec.at("resolution").at(0).get<std::size_t>(), spec.at("resolution").at(1).get<std::size_t>()};
    }
    const dl::Json& c = spec.at("criterion");
    if (c.at("kind").get<std::string>() == "regularizer" || c.at("kind").get<std::string>() == "taylor") {
      const auto& src = std::get<dl::DiscreteSource>(source);
      const dl::DropoutConfig cfg{dl::probability_from_json(c.at("q"))};
      const bool taylor = c.at("kind").get<std::string>() == "taylor";
      grid = dl::grid_scan(
          [&](double a, double b) {
            return taylor ? dl::taylor_regularizer(src, cfg, {a, b}) : dl::dropout_regularizer(src, cfg, {a, b});
          },
          window, res);
    } else {
      grid = dl::grid_scan(dl::criterion_from_json(c, source), window, res);
    }
  } catch (const dl::Json::exception& e) {
    throw UsageError(std::string("malformed spec: ") + e.what());
  } catch (const std::bad_variant_access&) {
    throw UsageError("regularizer scans need a discrete source");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  dl::write_csv(csv, dl::grid_to_csv(grid));
  emit(csv.str(), o.out);
  return kOk;
}

void add_numeric(CLI::App* cmd, Options& o, bool highdim) {
  cmd->add_option("--q", o.q, "drop probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lambda", o.lambda, "penalty weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", o.tol, "gradient tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "iteration budget");
  if (highdim) {
    cmd->add_option("--n", o.n, "number of features");
    cmd->add_option("--eta", o.eta, "head noise rate of the symmetric source");
    cmd->add_option("--alpha", o.alpha, "head magnitude of the symmetric source");
    cmd->add_option("--beta", o.beta, "tail bias of the symmetric source");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact dropout and regularization experiments for linear logistic models"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "run the check suite and print a JSON report");
  verify->add_option("--only", o.only, "check ids to run")->delimiter(',');
  verify->add_option("--out", o.out, "report path (default stdout)");

  auto* figure = app.add_subcommand("figure", "write figure panels as CSV plus a JSON sidecar");
  figure->add_option("id", o.figure_id, "fig1 .. fig5")->required();
  figure->add_option("--out", o.out, "output directory");
  add_numeric(figure, o, false);

  auto* optimize = app.add_subcommand("optimize", "minimize one criterion");
  optimize->add_option("--json", o.json, "spec (inline JSON or file) with source, criterion, solver")->required();
  optimize->add_option("--out", o.out, "result path (default stdout)");
  add_numeric(optimize, o, false);

  auto* separate = app.add_subcommand("separate", "run a separation experiment");
  separate->add_option("pair", o.pair, "2d, highdim or l1")->required();
  separate->add_option("--out", o.out, "report path (default stdout)");
  add_numeric(separate, o, true);

  auto* scan = app.add_subcommand("scan", "evaluate a criterion on a grid and print CSV");
  scan->add_option("--json", o.json, "spec with source, criterion, window, resolution")->required();
  scan->add_option("--out", o.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(o);
    if (*figure) return cmd_figure(o);
    if (*optimize) return cmd_optimize(o);
    if (*separate) return cmd_separate(o);
    if (*scan) return cmd_scan(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
