#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shapley/matrix.hpp"

namespace shapley::bench {

struct Dataset {
  DataMatrix x;
  std::vector<double> y;
  std::vector<std::string> feature_names;
  std::string target_name;

  std::size_t num_features() const { return feature_names.size(); }
  std::size_t num_rows() const { return y.size(); }
};

/// Reads a headered numeric CSV. The target column is `target` when given, otherwise the
/// last column. Throws DataError on unreadable files, ragged rows, non-numeric cells and
/// non-finite values (row and column named in the message).
Dataset load_dataset(const std::filesystem::path& path, const std::string& target = "");

/// Same as load_dataset, from CSV text.
Dataset parse_dataset(const std::string& text, const std::string& target = "", const std::string& source = "<memory>");

struct SyntheticSpec {
  std::size_t n_rows = 500;
  std::size_t d = 10;
  /// Correlation between consecutive feature pairs (0,1), (2,3), ...
  double rho = 0.5;
  double noise = 0.1;
  std::uint64_t seed = 7;

  bool operator==(const SyntheticSpec&) const = default;
};

/// Correlated Gaussian features with a nonlinear target containing main effects,
/// pairwise interactions and a threshold term.
Dataset synthetic_dataset(const SyntheticSpec& spec);

/// Copy with `n` all-zero columns appended.
Dataset with_dummy_features(const Dataset& data, std::size_t n);

}  // namespace shapley::bench
