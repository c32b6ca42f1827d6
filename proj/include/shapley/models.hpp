#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace shapley {

/// f(x) = beta0 + sum_i beta_i x_i.
struct LinearModel {
  std::vector<double> beta;
  double beta0 = 0.0;

  std::size_t num_features() const { return beta.size(); }
  double predict(std::span<const double> x) const;

  bool operator==(const LinearModel&) const = default;
};

/// One node of an array-encoded binary tree. A leaf has feature == kLeaf.
/// Routing: go left iff x[feature] <= threshold.
struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double leaf_value = 0.0;
  double cover = 0.0;

  bool is_leaf() const { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// Node 0 is the root; children always have larger indices than their parent.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  std::size_t leaf_index(std::span<const double> x) const;
  std::size_t max_depth() const;
  /// Largest feature index referenced, or -1 for a single leaf.
  std::int32_t max_feature() const;

  /// Structural checks: non-empty, children in range and strictly forward, every non-root
  /// node has exactly one parent. Throws ModelError.
  void validate() const;
  /// Cover checks used by path-dependent traversal: every cover > 0 and each internal
  /// node's cover equals the sum of its children's within relative tolerance. Throws ModelError.
  void validate_cover(double rel_tol = 1e-9) const;

  bool operator==(const Tree&) const = default;
};

/// f(x) = base_score + sum_t tree_t(x).
struct TreeEnsemble {
  std::vector<Tree> trees;
  double base_score = 0.0;

  double predict(std::span<const double> x) const;
  std::size_t max_depth() const;
  std::int32_t max_feature() const;
  void validate() const;

  bool operator==(const TreeEnsemble&) const = default;
};

using Model = std::variant<LinearModel, TreeEnsemble>;

/// Throws DataError when x is shorter than the highest feature index the model uses.
double predict(const Model& model, std::span<const double> x);

/// Minimum input length the model accepts.
std::size_t required_features(const Model& model);

}  // namespace shapley
