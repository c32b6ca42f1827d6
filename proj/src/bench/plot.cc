#include "shapley/bench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shapley/errors.hpp"

namespace shapley::bench {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 220.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string comment_safe(std::string s) {
  for (std::size_t pos = s.find("--"); pos != std::string::npos; pos = s.find("--", pos)) s.replace(pos, 2, "- -");
  return s;
}

struct Axis {
  int lo = 0;
  int hi = 1;
  double map(double v, double a, double b) const {
    const double t = (std::log10(v) - lo) / static_cast<double>(hi - lo);
    return a + t * (b - a);
  }
};

Axis decade_axis(double min_v, double max_v) {
  Axis ax;
  ax.lo = static_cast<int>(std::floor(std::log10(min_v)));
  ax.hi = static_cast<int>(std::ceil(std::log10(max_v)));
  if (ax.hi <= ax.lo) ax.hi = ax.lo + 1;
  return ax;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const std::string& title, const std::string& comment) {
  double min_x = INFINITY, max_x = 0.0, min_y = INFINITY, max_y = 0.0;
  for (const Series& s : series) {
    for (const SeriesPoint& p : s.points) {
      min_x = std::min(min_x, p.budget);
      max_x = std::max(max_x, p.budget);
      min_y = std::min(min_y, p.mse);
      max_y = std::max(max_y, p.mse);
    }
  }
  if (!(max_x > 0.0)) throw DataError("nothing to plot");
  const Axis ax = decade_axis(min_x, max_x);
  const Axis ay = decade_axis(min_y, max_y);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<!-- " << comment_safe(comment) << " -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape(title) << "</text>\n";
  svg << "<rect class=\"frame\" x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
      << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = ax.lo; k <= ax.hi; ++k) {
    const double x = ax.map(std::pow(10.0, k), x0, x1);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y0 + 5)
        << "\" stroke=\"black\"/>\n";
    svg << "<text class=\"xtick\" x=\"" << num(x) << "\" y=\"" << num(y0 + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << k << "</text>\n";
  }
  for (int k = ay.lo; k <= ay.hi; ++k) {
    const double y = ay.map(std::pow(10.0, k), y0, y1);
    svg << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text class=\"ytick\" x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << k << "</text>\n";
  }
  svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">game evaluations</text>\n";
  svg << "<text x=\"18\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 18 " << num((y0 + y1) / 2) << ")\">MSE</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    const auto& pts = series[s].points;
    if (pts.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < pts.size(); ++k) {
        svg << (k ? " " : "") << num(ax.map(pts[k].budget, x0, x1)) << "," << num(ay.map(pts[k].mse, y0, y1));
      }
      svg << "\"/>\n";
    }
    for (const SeriesPoint& p : pts) {
      svg << "<circle cx=\"" << num(ax.map(p.budget, x0, x1)) << "\" cy=\"" << num(ay.map(p.mse, y0, y1))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 10.0 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << num(x1 + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(x1 + 35) << "\" y2=\""
        << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(x1 + 40) << "\" y=\"" << num(ly + 4) << "\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

std::filesystem::path plot_one(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.csv");
  if (!in) throw DataError("cannot read " + (dir / "summary.csv").string());
  std::string line;
  std::string comment;
  std::vector<Series> series;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      comment += (comment.empty() ? "" : " ") + line.substr(std::min<std::size_t>(2, line.size()));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::vector<std::string> cells = split(line);
    if (cells.size() != 8) throw DataError("malformed summary row: " + line);
    const std::size_t n_trials = std::stoul(cells[6]);
    const double mse = std::strtod(cells[3].c_str(), nullptr);
    if (n_trials == 0 || std::isnan(mse)) continue;
    const std::string label = cells[0] + " (" + cells[1] + ")";
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}});
      it = series.end() - 1;
    }
    it->points.push_back({std::strtod(cells[2].c_str(), nullptr), std::max(mse, kPlotFloor)});
  }
  series.erase(std::remove_if(series.begin(), series.end(), [](const Series& s) { return s.points.empty(); }),
               series.end());
  if (series.empty()) throw DataError("nothing to plot in " + dir.string());
  for (Series& s : series) {
    std::sort(s.points.begin(), s.points.end(),
              [](const SeriesPoint& a, const SeriesPoint& b) { return a.budget < b.budget; });
  }
  const std::filesystem::path out = dir / "mse.svg";
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + out.string());
  file << render_svg(series, "MSE vs evaluations: " + dir.filename().string(), comment);
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir) {
  if (std::filesystem::exists(dir / "summary.csv")) return {plot_one(dir)};
  std::vector<std::filesystem::path> subdirs;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "summary.csv")) subdirs.push_back(entry.path());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) throw DataError("no summary.csv under " + dir.string() + ": nothing to plot");
  std::vector<std::filesystem::path> out;
  for (const auto& sub : subdirs) out.push_back(plot_one(sub));
  return out;
}

}  // namespace shapley::bench
