#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dropoutlab/analysis.hpp"

namespace dropoutlab {

using Json = nlohmann::ordered_json;

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_number(double v);
/// Inverse of format_number. Throws std::invalid_argument on junk.
double parse_number(const std::string& text);

/// Finite values as JSON numbers, infinities as the strings "inf" / "-inf".
Json number_json(double v);
double number_from_json(const Json& j);

/// A probability given as a number or as an "a/b" fraction string.
double probability_from_json(const Json& j);

Json to_json(const DiscreteSource& source);
Json to_json(const ExchangeableSource& source);
Json to_json(const SourceVariant& source);

/// Accepts an explicit discrete source ({"n", "atoms"}), an explicit
/// exchangeable source ({"n", "head", "tail", "label_symmetric"}), or a named
/// builder: {"name": "p5"}, {"name": "p6"}, {"name": "p7", "n": 4},
/// {"name": "p8", "n": 100, "eta": ..., "alpha": ..., "beta": ...},
/// {"name": "point", "x": [...], "y": 1}.
SourceVariant source_from_json(const Json& j);

/// {"kind": "l2", "lambda": 0.02} or {"kind": "dropout_nu", "q": 0.5}.
Json criterion_spec_json(const Criterion& c);
Criterion criterion_from_json(const Json& spec, const SourceVariant& source);

Json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const Json& j);

Json to_json(const OptimizationResult& r);
Json to_json(const SeparationReport& r);
Json to_json(const TheoremCheckResult& r);
Json verify_report_json(const std::vector<TheoremCheckResult>& results);

/// Header of column names followed by numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// First header cell is "<y>\<x>", the rest are the x axis; each row starts
/// with its y value.
CsvTable grid_to_csv(const Grid& grid, const std::string& x_label = "w1", const std::string& y_label = "w2");
Grid grid_from_csv(const CsvTable& table);

}  // namespace dropoutlab
