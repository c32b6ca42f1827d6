#include "shapley/bench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shapley/errors.hpp"
#include "shapley/gaussian.hpp"
#include "shapley/random.hpp"

namespace shapley::bench {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Dataset parse_dataset(const std::string& text, const std::string& target, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw DataError(source + ": missing header");
  for (auto& h : header) h = trim(h);
  if (header.size() < 2) throw DataError(source + ": need at least one feature column and a target column");

  std::size_t target_col = header.size() - 1;
  if (!target.empty()) {
    const auto it = std::find(header.begin(), header.end(), target);
    if (it == header.end()) throw DataError(source + ": target column '" + target + "' not found");
    target_col = static_cast<std::size_t>(it - header.begin());
  }

  Dataset out;
  out.target_name = header[target_col];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_col) out.feature_names.push_back(header[c]);
  }
  std::vector<double> row(header.size() - 1);
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++data_row;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    double y = 0.0;
    for (std::size_t c = 0, k = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double value = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cell.empty() || ec != std::errc() || ptr != last) {
        throw DataError(source + ": row " + std::to_string(data_row) + ", column '" + header[c] +
                        "': non-numeric cell '" + cell + "'");
      }
      if (!std::isfinite(value)) {
        throw DataError(source + ": row " + std::to_string(data_row) + ", column '" + header[c] +
                        "': non-finite value '" + cell + "'");
      }
      if (c == target_col) {
        y = value;
      } else {
        row[k++] = value;
      }
    }
    out.x.push_row(row);
    out.y.push_back(y);
  }
  if (out.x.rows() == 0) out.x = DataMatrix(0, out.feature_names.size());
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const std::string& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), target, path.string());
}

Dataset synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.d < 2) throw ConfigError("synthetic dataset needs d >= 2");
  if (spec.n_rows == 0) throw ConfigError("synthetic dataset needs at least one row");
  if (!(std::abs(spec.rho) < 1.0)) throw ConfigError("synthetic rho must lie in (-1, 1)");
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i + 1 < spec.d; i += 2) groups.push_back({i, i + 1});
  const GaussianDistribution dist = GaussianDistribution::correlated(spec.d, groups, spec.rho);
  Dataset out;
  out.x = sample_gaussian(dist, spec.n_rows, spec.seed);
  CounterRng noise(mix_key({spec.seed, 0x6e6f697365ULL}));
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    const auto x = out.x.row(r);
    double y = 0.0;
    for (std::size_t i = 0; i < spec.d; ++i) {
      const double w = 1.0 / static_cast<double>(i + 1);
      y += (i % 3 == 0 ? std::sin(2.0 * x[i]) : x[i]) * w * (i % 2 == 0 ? 2.0 : -1.0);
    }
    for (std::size_t i = 0; i + 1 < spec.d; i += 2) y += 0.5 * x[i] * x[i + 1];
    y += x[spec.d - 1] > 0.5 ? 1.5 : 0.0;
    out.y.push_back(y + spec.noise * noise.normal());
  }
  for (std::size_t i = 0; i < spec.d; ++i) out.feature_names.push_back("x" + std::to_string(i));
  out.target_name = "y";
  return out;
}

Dataset with_dummy_features(const Dataset& data, std::size_t n) {
  if (n == 0) return data;
  Dataset out;
  out.y = data.y;
  out.target_name = data.target_name;
  out.feature_names = data.feature_names;
  const std::size_t d = data.num_features();
  for (std::size_t k = 0; k < n; ++k) out.feature_names.push_back("dummy" + std::to_string(k));
  out.x = DataMatrix(data.x.rows(), d + n, 0.0);
  for (std::size_t r = 0; r < data.x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) out.x(r, c) = data.x(r, c);
  }
  return out;
}

}  // namespace shapley::bench
