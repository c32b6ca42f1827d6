#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace shapley::bench {

/// Exact methods (mse = 0) are drawn at this value on the log axis.
inline constexpr double kPlotFloor = 1e-16;

struct SeriesPoint {
  double budget = 0.0;
  double mse = 0.0;
};

struct Series {
  std::string label;
  std::vector<SeriesPoint> points;
};

/// Log-log MSE-vs-evaluations chart as a self-contained SVG document. `comment` is embedded
/// in an XML comment.
std::string render_svg(const std::vector<Series>& series, const std::string& title, const std::string& comment);

/// Reads summary.csv from `dir` (or from each immediate subdirectory holding one) and writes
/// mse.svg next to it. Returns the files written. Throws DataError when there is nothing to plot.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir);

}  // namespace shapley::bench
