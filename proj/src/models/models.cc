#include "shapley/models.hpp"

#include <algorithm>
#include <string>

#include "shapley/errors.hpp"

namespace shapley {

double LinearModel::predict(std::span<const double> x) const {
  if (x.size() < beta.size()) {
    throw DataError("linear model expects " + std::to_string(beta.size()) + " features, got " +
                    std::to_string(x.size()));
  }
  double out = beta0;
  for (std::size_t i = 0; i < beta.size(); ++i) out += beta[i] * x[i];
  return out;
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    const auto f = static_cast<std::size_t>(n.feature);
    if (f >= x.size()) {
      throw DataError("tree splits on feature " + std::to_string(f) + " but input has " +
                      std::to_string(x.size()) + " features");
    }
    node = static_cast<std::size_t>(x[f] <= n.threshold ? n.left : n.right);
  }
  return node;
}

double Tree::predict(std::span<const double> x) const { return nodes[leaf_index(x)].leaf_value; }

std::size_t Tree::max_depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> depth(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return best;
}

std::int32_t Tree::max_feature() const {
  std::int32_t best = -1;
  for (const TreeNode& n : nodes) best = std::max(best, n.feature);
  return best;
}

void Tree::validate() const {
  if (nodes.empty()) throw ModelError("tree has no nodes");
  const auto n = static_cast<std::int32_t>(nodes.size());
  std::vector<int> parents(nodes.size(), 0);
  for (std::int32_t i = 0; i < n; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (node.is_leaf()) continue;
    if (node.feature < 0) throw ModelError("node " + std::to_string(i) + " has negative feature");
    for (std::int32_t child : {node.left, node.right}) {
      if (child <= i || child >= n) {
        throw ModelError("node " + std::to_string(i) + " has child " + std::to_string(child) +
                         " outside (" + std::to_string(i) + ", " + std::to_string(n) + ")");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
    if (node.left == node.right) throw ModelError("node " + std::to_string(i) + " has identical children");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (parents[i] != 1) {
      throw ModelError("node " + std::to_string(i) + " has " + std::to_string(parents[i]) + " parents");
    }
  }
}

void Tree::validate_cover(double rel_tol) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& node = nodes[i];
    if (!(node.cover > 0.0)) {
      throw ModelError("node " + std::to_string(i) + " has non-positive cover");
    }
    if (node.is_leaf()) continue;
    const double children = nodes[static_cast<std::size_t>(node.left)].cover +
                            nodes[static_cast<std::size_t>(node.right)].cover;
    if (std::abs(children - node.cover) > rel_tol * node.cover) {
      throw ModelError("node " + std::to_string(i) + " cover " + std::to_string(node.cover) +
                       " != children sum " + std::to_string(children));
    }
  }
}

double TreeEnsemble::predict(std::span<const double> x) const {
  double out = base_score;
  for (const Tree& t : trees) out += t.predict(x);
  return out;
}

std::size_t TreeEnsemble::max_depth() const {
  std::size_t best = 0;
  for (const Tree& t : trees) best = std::max(best, t.max_depth());
  return best;
}

std::int32_t TreeEnsemble::max_feature() const {
  std::int32_t best = -1;
  for (const Tree& t : trees) best = std::max(best, t.max_feature());
  return best;
}

void TreeEnsemble::validate() const {
  for (const Tree& t : trees) t.validate();
}

double predict(const Model& model, std::span<const double> x) {
  return std::visit([x](const auto& m) { return m.predict(x); }, model);
}

std::size_t required_features(const Model& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) return lin->beta.size();
  return static_cast<std::size_t>(std::get<TreeEnsemble>(model).max_feature() + 1);
}

}  // namespace shapley
