#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dropoutlab {

struct FigureOptions {
  double q = 0.5;
  /// Penalty weight; fig4 defaults to 1/(30 n) when unset.
  std::optional<double> lambda;
  /// Samples per axis for heatmap panels.
  std::size_t resolution = 81;
  /// Solver tolerance used for the marked minimizers.
  double tolerance = 1e-10;
};

const std::vector<std::string>& figure_ids();

/// Writes the CSV panels of one figure plus <id>.json describing minimizers
/// and Bayes regions. Returns the written file names in order. Throws
/// std::invalid_argument for an unknown id.
std::vector<std::string> write_figure(const std::string& id, const std::filesystem::path& out_dir,
                                      const FigureOptions& options = {});

}  // namespace dropoutlab
