#include "dropoutlab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dropoutlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  throw std::invalid_argument("expected a number");
}

double probability_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const double num = parse_number(s.substr(0, slash));
      const double den = parse_number(s.substr(slash + 1));
      if (den == 0.0) throw std::invalid_argument("zero denominator in '" + s + "'");
      return num / den;
    }
  }
  return number_from_json(j);
}

Json to_json(const DiscreteSource& source) {
  Json atoms = Json::array();
  for (const auto& a : source.atoms()) atoms.push_back({{"x", a.x}, {"y", a.y}, {"p", a.prob}});
  return {{"n", source.dimension()}, {"atoms", atoms}};
}

Json to_json(const ExchangeableSource& source) {
  Json head = Json::array();
  for (const auto& h : source.head()) head.push_back({{"value", h.value}, {"p", h.prob}});
  Json tail;
  if (const auto* fc = std::get_if<FixedComposition>(&source.tail())) {
    tail = {{"type", "fixed_composition"}, {"num_plus", fc->num_plus}, {"num_minus", fc->num_minus}};
  } else {
    tail = {{"type", "independent_signs"}, {"bias", std::get<IndependentSigns>(source.tail()).bias}};
  }
  return {{"n", source.dimension()}, {"head", head}, {"tail", tail}, {"label_symmetric", source.label_symmetric()}};
}

Json to_json(const SourceVariant& source) {
  return std::visit([](const auto& s) { return to_json(s); }, source);
}

SourceVariant source_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("source spec must be a JSON object");
  if (j.contains("name")) {
    const auto name = j.at("name").get<std::string>();
    if (name == "p5") return build_p5();
    if (name == "p6") return build_p6();
    if (name == "p7") return build_p7(j.at("n").get<std::size_t>());
    if (name == "p8") {
      const auto n = j.at("n").get<std::size_t>();
      const double beta = j.contains("beta") ? number_from_json(j.at("beta")) : p8_default_beta(n);
      return build_p8(n, probability_from_json(j.at("eta")), number_from_json(j.at("alpha")), beta);
    }
    if (name == "point") return point_mass(j.at("x").get<Vector>(), j.value("y", 1));
    throw std::invalid_argument("unknown source name '" + name + "'");
  }
  const auto n = j.at("n").get<std::size_t>();
  if (j.contains("atoms")) {
    std::vector<LabeledAtom> atoms;
    for (const auto& a : j.at("atoms")) {
      atoms.push_back({a.at("x").get<Vector>(), a.at("y").get<int>(), probability_from_json(a.at("p"))});
    }
    return DiscreteSource(n, std::move(atoms));
  }
  std::vector<HeadValue> head;
  for (const auto& h : j.at("head")) {
    head.push_back({number_from_json(h.at("value")), probability_from_json(h.at("p"))});
  }
  const Json& t = j.at("tail");
  const auto type = t.at("type").get<std::string>();
  TailModel tail;
  if (type == "fixed_composition") {
    tail = FixedComposition{t.at("num_plus").get<std::size_t>(), t.at("num_minus").get<std::size_t>()};
  } else if (type == "independent_signs") {
    tail = IndependentSigns{number_from_json(t.at("bias"))};
  } else {
    throw std::invalid_argument("unknown tail type '" + type + "'");
  }
  return ExchangeableSource(n, std::move(head), tail, j.value("label_symmetric", false));
}

Json criterion_spec_json(const Criterion& c) {
  Json j = {{"kind", to_string(c.kind())}};
  if (c.is_dropout()) j["q"] = c.q();
  if (c.kind() == CriterionKind::L2 || c.kind() == CriterionKind::L1 || c.kind() == CriterionKind::ReducedL2) {
    j["lambda"] = c.lambda();
  }
  return j;
}

Criterion criterion_from_json(const Json& spec, const SourceVariant& source) {
  if (!spec.is_object()) throw std::invalid_argument("criterion spec must be a JSON object");
  const CriterionKind kind = criterion_kind_from_string(spec.at("kind").get<std::string>());
  auto discrete = [&]() -> const DiscreteSource& {
    if (const auto* d = std::get_if<DiscreteSource>(&source)) return *d;
    throw std::invalid_argument("criterion " + to_string(kind) + " needs a discrete source");
  };
  auto exchangeable = [&]() -> const ExchangeableSource& {
    if (const auto* e = std::get_if<ExchangeableSource>(&source)) return *e;
    throw std::invalid_argument("criterion " + to_string(kind) + " needs an exchangeable source");
  };
  auto q = [&]() { return probability_from_json(spec.at("q")); };
  auto lambda = [&]() { return probability_from_json(spec.at("lambda")); };
  switch (kind) {
    case CriterionKind::Plain: return Criterion::plain(discrete());
    case CriterionKind::DropoutNu: return Criterion::dropout_nu(discrete(), q());
    case CriterionKind::DropoutR: return Criterion::dropout_r(discrete(), q());
    case CriterionKind::L2: return Criterion::l2(discrete(), lambda());
    case CriterionKind::L1: return Criterion::l1(discrete(), lambda());
    case CriterionKind::ReducedDropout: return Criterion::reduced_dropout(exchangeable(), q());
    case CriterionKind::ReducedL2: return Criterion::reduced_l2(exchangeable(), lambda());
  }
  throw std::logic_error("unknown criterion kind");
}

Json to_json(const SolverConfig& cfg) {
  return {{"tolerance", cfg.tolerance},
          {"max_iterations", cfg.max_iterations},
          {"initial_point", cfg.initial_point},
          {"shrink", cfg.shrink},
          {"sufficient_decrease", cfg.sufficient_decrease}};
}

SolverConfig solver_config_from_json(const Json& j) {
  SolverConfig cfg;
  if (!j.is_object()) throw std::invalid_argument("solver config must be a JSON object");
  if (j.contains("tolerance")) cfg.tolerance = number_from_json(j.at("tolerance"));
  if (j.contains("max_iterations")) cfg.max_iterations = j.at("max_iterations").get<std::size_t>();
  if (j.contains("initial_point")) cfg.initial_point = j.at("initial_point").get<Vector>();
  if (j.contains("shrink")) cfg.shrink = number_from_json(j.at("shrink"));
  if (j.contains("sufficient_decrease")) cfg.sufficient_decrease = number_from_json(j.at("sufficient_decrease"));
  cfg.validate();
  return cfg;
}

namespace {

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

}  // namespace

Json to_json(const OptimizationResult& r) {
  return {{"minimizer", vector_json(r.minimizer)},
          {"value", number_json(r.value)},
          {"grad_norm", number_json(r.grad_norm)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"method", r.method}};
}

Json to_json(const SeparationReport& r) {
  const std::string reg = r.regularizer;
  Json solves = Json::object();
  for (const auto& s : r.solves) solves[s.name] = to_json(s.result);
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back({{"description", w.description}, {"value", number_json(w.value)}});
  return {{"experiment", r.experiment},
          {"source_pair", {r.source_p, r.source_q}},
          {"regularizer", reg},
          {"q", r.q},
          {"lambda", r.lambda},
          {"er_dropout_P", r.er_dropout_p},
          {"er_" + reg + "_P", r.er_reg_p},
          {"er_dropout_Q", r.er_dropout_q},
          {"er_" + reg + "_Q", r.er_reg_q},
          {"C_achieved", number_json(r.c_achieved)},
          {"solves", solves},
          {"witnesses", witnesses}};
}

Json to_json(const TheoremCheckResult& r) {
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back({{"description", w.description}, {"value", number_json(w.value)}});
  return {{"id", r.id}, {"passed", r.passed}, {"tolerance", number_json(r.tolerance)}, {"witnesses", witnesses}};
}

Json verify_report_json(const std::vector<TheoremCheckResult>& results) {
  std::size_t passed = 0;
  Json checks = Json::array();
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    checks.push_back(to_json(r));
  }
  return {{"total", results.size()}, {"passed", passed}, {"all_passed", passed == results.size()}, {"checks", checks}};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("write_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_csv: missing header");
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.header.size()) throw std::invalid_argument("read_csv: row width mismatch");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable grid_to_csv(const Grid& grid, const std::string& x_label, const std::string& y_label) {
  CsvTable t;
  t.header.push_back(y_label + "\\" + x_label);
  for (double x : grid.xs) t.header.push_back(format_number(x));
  for (std::size_t j = 0; j < grid.ys.size(); ++j) {
    std::vector<double> row{grid.ys[j]};
    for (std::size_t i = 0; i < grid.xs.size(); ++i) row.push_back(grid.at(i, j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Grid grid_from_csv(const CsvTable& table) {
  Grid g;
  for (std::size_t i = 1; i < table.header.size(); ++i) g.xs.push_back(parse_number(table.header[i]));
  for (const auto& row : table.rows) {
    g.ys.push_back(row.at(0));
    g.values.insert(g.values.end(), row.begin() + 1, row.end());
  }
  return g;
}

}  // namespace dropoutlab
