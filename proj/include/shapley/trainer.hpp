#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "shapley/matrix.hpp"
#include "shapley/models.hpp"

namespace shapley {

struct BoostingConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 4;
  double learning_rate = 0.1;
  /// Minimum training rows on each side of a split.
  std::size_t min_samples = 5;
  /// Fraction of rows drawn (without replacement) per tree; 1.0 uses every row.
  double subsample = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const BoostingConfig&) const = default;
};

/// Squared-error gradient boosting with greedy CART splits. base_score is the target mean;
/// each tree fits the current residuals and its leaves are scaled by the learning rate.
/// Every node's cover is the number of rows routed through it while fitting that tree.
/// Constant targets yield a single-leaf ensemble.
TreeEnsemble train_boosted_trees(const DataMatrix& x, std::span<const double> y,
                                 const BoostingConfig& cfg);

/// Ordinary least squares fit with intercept.
LinearModel fit_linear_model(const DataMatrix& x, std::span<const double> y);

}  // namespace shapley
