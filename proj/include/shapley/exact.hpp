#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shapley/game.hpp"
#include "shapley/gaussian.hpp"
#include "shapley/models.hpp"
#include "shapley/removal.hpp"

namespace shapley {

/// phi_i = beta_i (x_e[i] - mean_b x_b[i]).
AttributionVector linear_shap(const LinearModel& model, std::span<const double> x_e, const BaselineSet& baselines);

/// Coalition sums behind correlated LinearSHAP. With E[x | x_S = x_e_S] = P_S x_e + (I - P_S) mu,
/// B_i = sum_S w(S) (P_{S+i} - P_S) and A_i = -B_i, so phi_i = beta^T A_i mu + beta^T B_i x_e.
struct CorrelatedLinearCoefficients {
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::MatrixXd> b;
  /// Number of conditional-mean maps computed.
  std::uint64_t n_coalitions_sampled = 0;
  bool exhaustive = false;
};

class CorrelatedLinearShap {
 public:
  CorrelatedLinearShap(LinearModel model, GaussianDistribution dist, CorrelatedLinearCoefficients coefficients);

  const CorrelatedLinearCoefficients& coefficients() const { return coefficients_; }
  /// O(d) per explicand.
  AttributionVector explain(std::span<const double> x_e) const;

 private:
  LinearModel model_;
  GaussianDistribution dist_;
  CorrelatedLinearCoefficients coefficients_;
  std::vector<Eigen::VectorXd> slope_;  // B_i^T beta
  std::vector<double> offset_;          // beta^T A_i mu
};

inline constexpr std::size_t kExhaustiveCorrelatedMax = 12;

/// Exhaustive over all coalitions when d <= 12; otherwise n_coalitions random permutations,
/// each contributing the d + 1 prefix maps.
CorrelatedLinearShap correlated_linear_shap(const LinearModel& model, const GaussianDistribution& dist,
                                            std::size_t n_coalitions, std::uint64_t seed);

/// Baseline/marginal Shapley values of a tree ensemble, averaged over the baseline rows.
AttributionVector interventional_tree_shap(const TreeEnsemble& model, std::span<const double> x_e,
                                           const BaselineSet& baselines);

/// Cover-weighted traversal Shapley values. Requires positive, consistent covers.
AttributionVector path_dependent_tree_shap(const TreeEnsemble& model, std::span<const double> x_e);

/// Value of the cover-weighted traversal game: present features route by x_e, absent
/// features average both children by cover.
double path_dependent_value(const TreeEnsemble& model, std::span<const double> x_e, const Coalition& present);

}  // namespace shapley
