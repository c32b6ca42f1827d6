#include <cmath>
#include <string>

#include "shapley/errors.hpp"
#include "shapley/exact.hpp"

namespace shapley {

namespace {

std::size_t child_for(const TreeNode& node, double value) {
  return static_cast<std::size_t>(value <= node.threshold ? node.left : node.right);
}

void check_inputs(const TreeEnsemble& model, std::size_t n_features, const char* what) {
  const std::int32_t top = model.max_feature();
  if (top >= 0 && static_cast<std::size_t>(top) >= n_features) {
    throw DataError(std::string(what) + " has " + std::to_string(n_features) + " features, model uses feature " +
                    std::to_string(top));
  }
}

// (n-1)! p! / (n+p)! = 1 / ((n+p) C(n+p-1, p))
double path_weight(std::size_t n, std::size_t p) {
  double binom = 1.0;
  for (std::size_t k = 1; k <= p; ++k) binom = binom * static_cast<double>(n - 1 + k) / static_cast<double>(k);
  return 1.0 / (static_cast<double>(n + p) * binom);
}

// Per-leaf path games for one (tree, baseline) pair. A feature on the path is "e-only" when
// just the explicand satisfies its conditions and "b-only" when just the baseline does.
class LeafWalker {
 public:
  LeafWalker(const Tree& tree, std::span<const double> x_e, std::span<const double> x_b, std::vector<double>& phi)
      : tree_(tree), x_e_(x_e), x_b_(x_b), phi_(phi), e_ok_(phi.size(), 1), b_ok_(phi.size(), 1) {}

  void run() { visit(0); }

 private:
  void visit(std::size_t index) {
    const TreeNode& node = tree_.nodes[index];
    if (node.is_leaf()) {
      credit(node.leaf_value);
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const std::size_t ce = child_for(node, x_e_[f]);
    const std::size_t cb = child_for(node, x_b_[f]);
    for (std::size_t child : {static_cast<std::size_t>(node.left), static_cast<std::size_t>(node.right)}) {
      const char e_prev = e_ok_[f];
      const char b_prev = b_ok_[f];
      const char e_next = e_prev && ce == child;
      const char b_next = b_prev && cb == child;
      if (!e_next && !b_next) continue;
      const bool fresh = e_prev && b_prev && !(e_next && b_next);
      e_ok_[f] = e_next;
      b_ok_[f] = b_next;
      if (fresh) path_.push_back(f);
      visit(child);
      if (fresh) path_.pop_back();
      e_ok_[f] = e_prev;
      b_ok_[f] = b_prev;
    }
  }

  void credit(double value) {
    std::size_t n = 0;
    std::size_t p = 0;
    for (std::size_t f : path_) (e_ok_[f] ? n : p) += 1;
    if (n + p == 0) return;
    const double w_pos = n > 0 ? value * path_weight(n, p) : 0.0;
    const double w_neg = p > 0 ? value * path_weight(p, n) : 0.0;
    for (std::size_t f : path_) {
      if (e_ok_[f]) {
        phi_[f] += w_pos;
      } else {
        phi_[f] -= w_neg;
      }
    }
  }

  const Tree& tree_;
  std::span<const double> x_e_;
  std::span<const double> x_b_;
  std::vector<double>& phi_;
  std::vector<char> e_ok_;
  std::vector<char> b_ok_;
  std::vector<std::size_t> path_;
};

struct PathElement {
  std::int32_t feature;
  double zero_fraction;
  double one_fraction;
  double weight;
};

using Path = std::vector<PathElement>;

void extend(Path& m, std::size_t l, double zero, double one, std::int32_t feature) {
  m[l] = {feature, zero, one, l == 0 ? 1.0 : 0.0};
  const double denom = static_cast<double>(l + 1);
  for (std::size_t k = l; k-- > 0;) {
    m[k + 1].weight += one * m[k].weight * static_cast<double>(k + 1) / denom;
    m[k].weight = zero * m[k].weight * static_cast<double>(l - k) / denom;
  }
}

void unwind(Path& m, std::size_t l, std::size_t i) {
  const double one = m[i].one_fraction;
  const double zero = m[i].zero_fraction;
  const double denom = static_cast<double>(l + 1);
  double next = m[l].weight;
  for (std::size_t k = l; k-- > 0;) {
    if (one != 0.0) {
      const double tmp = m[k].weight;
      m[k].weight = next * denom / (static_cast<double>(k + 1) * one);
      next = tmp - m[k].weight * zero * static_cast<double>(l - k) / denom;
    } else {
      m[k].weight = m[k].weight * denom / (zero * static_cast<double>(l - k));
    }
  }
  for (std::size_t k = i; k < l; ++k) {
    m[k].feature = m[k + 1].feature;
    m[k].zero_fraction = m[k + 1].zero_fraction;
    m[k].one_fraction = m[k + 1].one_fraction;
  }
}

double unwound_sum(const Path& m, std::size_t l, std::size_t i) {
  const double one = m[i].one_fraction;
  const double zero = m[i].zero_fraction;
  const double denom = static_cast<double>(l + 1);
  double next = m[l].weight;
  double total = 0.0;
  for (std::size_t k = l; k-- > 0;) {
    if (one != 0.0) {
      const double tmp = next * denom / (static_cast<double>(k + 1) * one);
      total += tmp;
      next = m[k].weight - tmp * zero * static_cast<double>(l - k) / denom;
    } else {
      total += m[k].weight / zero * denom / static_cast<double>(l - k);
    }
  }
  return total;
}

class PathDependentWalker {
 public:
  PathDependentWalker(const Tree& tree, std::span<const double> x_e, std::vector<double>& phi)
      : tree_(tree), x_e_(x_e), phi_(phi) {}

  void run() { recurse(0, Path{}, 0, 1.0, 1.0, -1); }

 private:
  void recurse(std::size_t index, const Path& parent, std::size_t depth, double zero, double one,
               std::int32_t feature) {
    Path m(parent.begin(), parent.begin() + static_cast<std::ptrdiff_t>(std::min(parent.size(), depth)));
    m.resize(depth + 1);
    extend(m, depth, zero, one, feature);
    const TreeNode& node = tree_.nodes[index];
    if (node.is_leaf()) {
      for (std::size_t k = 1; k <= depth; ++k) {
        const double w = unwound_sum(m, depth, k);
        phi_[static_cast<std::size_t>(m[k].feature)] += w * (m[k].one_fraction - m[k].zero_fraction) * node.leaf_value;
      }
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const std::size_t hot = child_for(node, x_e_[f]);
    const std::size_t cold = hot == static_cast<std::size_t>(node.left) ? static_cast<std::size_t>(node.right)
                                                                        : static_cast<std::size_t>(node.left);
    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    std::size_t unique = depth;
    for (std::size_t k = 1; k <= depth; ++k) {
      if (m[k].feature == node.feature) {
        incoming_zero = m[k].zero_fraction;
        incoming_one = m[k].one_fraction;
        unwind(m, depth, k);
        --unique;
        break;
      }
    }
    const double cover = node.cover;
    recurse(hot, m, unique + 1, incoming_zero * tree_.nodes[hot].cover / cover, incoming_one, node.feature);
    recurse(cold, m, unique + 1, incoming_zero * tree_.nodes[cold].cover / cover, 0.0, node.feature);
  }

  const Tree& tree_;
  std::span<const double> x_e_;
  std::vector<double>& phi_;
};

double traversal_value(const Tree& tree, std::size_t index, std::span<const double> x_e, const Coalition& present) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return node.leaf_value;
  const auto f = static_cast<std::size_t>(node.feature);
  if (present.contains(f)) return traversal_value(tree, child_for(node, x_e[f]), x_e, present);
  const auto left = static_cast<std::size_t>(node.left);
  const auto right = static_cast<std::size_t>(node.right);
  return (tree.nodes[left].cover * traversal_value(tree, left, x_e, present) +
          tree.nodes[right].cover * traversal_value(tree, right, x_e, present)) /
         node.cover;
}

}  // namespace

AttributionVector interventional_tree_shap(const TreeEnsemble& model, std::span<const double> x_e,
                                           const BaselineSet& baselines) {
  model.validate();
  const std::size_t d = x_e.size();
  check_inputs(model, d, "explicand");
  if (baselines.num_features() != d) throw DataError("baseline set and explicand have different feature counts");
  AttributionVector out;
  out.phi.assign(d, 0.0);
  std::vector<double> per_baseline(d);
  double mean_baseline = 0.0;
  for (std::size_t b = 0; b < baselines.size(); ++b) {
    std::fill(per_baseline.begin(), per_baseline.end(), 0.0);
    for (const Tree& tree : model.trees) LeafWalker(tree, x_e, baselines.row(b), per_baseline).run();
    for (std::size_t i = 0; i < d; ++i) out.phi[i] += per_baseline[i];
    mean_baseline += model.predict(baselines.row(b));
  }
  const double n = static_cast<double>(baselines.size());
  for (double& v : out.phi) v /= n;
  out.v_empty = mean_baseline / n;
  out.v_full = model.predict(x_e);
  return out;
}

AttributionVector path_dependent_tree_shap(const TreeEnsemble& model, std::span<const double> x_e) {
  model.validate();
  for (const Tree& tree : model.trees) tree.validate_cover();
  const std::size_t d = x_e.size();
  check_inputs(model, d, "explicand");
  AttributionVector out;
  out.phi.assign(d, 0.0);
  for (const Tree& tree : model.trees) PathDependentWalker(tree, x_e, out.phi).run();
  out.v_empty = path_dependent_value(model, x_e, Coalition::empty(d));
  out.v_full = model.predict(x_e);
  return out;
}

double path_dependent_value(const TreeEnsemble& model, std::span<const double> x_e, const Coalition& present) {
  double total = model.base_score;
  for (const Tree& tree : model.trees) total += traversal_value(tree, 0, x_e, present);
  return total;
}

}  // namespace shapley
