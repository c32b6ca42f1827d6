#include "oracles.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace testing_support {

double factorial(std::size_t n) {
  double out = 1.0;
  for (std::size_t k = 2; k <= n; ++k) out *= static_cast<double>(k);
  return out;
}

std::vector<double> naive_shapley(std::size_t d, const std::function<double(const std::set<std::size_t>&)>& v) {
  std::vector<double> phi(d, 0.0);
  const double d_fact = factorial(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) others.push_back(j);
    }
    const std::size_t m = others.size();
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << m); ++pick) {
      std::set<std::size_t> s;
      for (std::size_t k = 0; k < m; ++k) {
        if ((pick >> k) & 1U) s.insert(others[k]);
      }
      std::set<std::size_t> with = s;
      with.insert(i);
      const double w = factorial(s.size()) * factorial(d - s.size() - 1) / d_fact;
      phi[i] += w * (v(with) - v(s));
    }
  }
  return phi;
}

std::vector<double> naive_shapley(const shapley::CoalitionalGame& game) {
  const std::size_t d = game.num_players();
  return naive_shapley(d, [&](const std::set<std::size_t>& s) {
    Coalition c(d);
    for (std::size_t p : s) c.insert(p);
    return game.evaluate(c);
  });
}

std::unique_ptr<shapley::TabulatedGame> random_game(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> table(std::size_t{1} << d);
  for (double& v : table) v = n(rng);
  return std::make_unique<shapley::TabulatedGame>(d, std::move(table));
}

std::unique_ptr<shapley::FunctionGame> additive_game(const std::vector<double>& c) {
  return std::make_unique<shapley::FunctionGame>(c.size(), [c](const Coalition& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (s.contains(i)) total += c[i];
    }
    return total;
  });
}

namespace {

std::int32_t grow(std::mt19937_64& rng, shapley::Tree& tree, std::size_t d, std::size_t depth, std::size_t max_depth) {
  const auto index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool leaf = depth == max_depth || (depth > 0 && u(rng) < 0.25);
  if (leaf) {
    tree.nodes[index].leaf_value = std::normal_distribution<double>(0.0, 1.0)(rng);
    tree.nodes[index].cover = static_cast<double>(std::uniform_int_distribution<int>(1, 50)(rng));
    return index;
  }
  const auto feature = static_cast<std::int32_t>(std::uniform_int_distribution<std::size_t>(0, d - 1)(rng));
  const double threshold = std::normal_distribution<double>(0.0, 1.0)(rng);
  const std::int32_t left = grow(rng, tree, d, depth + 1, max_depth);
  const std::int32_t right = grow(rng, tree, d, depth + 1, max_depth);
  auto& node = tree.nodes[index];
  node.feature = feature;
  node.threshold = threshold;
  node.left = left;
  node.right = right;
  node.cover = tree.nodes[left].cover + tree.nodes[right].cover;
  return index;
}

}  // namespace

shapley::Tree random_tree(std::mt19937_64& rng, std::size_t d, std::size_t max_depth) {
  shapley::Tree tree;
  grow(rng, tree, d, 0, max_depth);
  return tree;
}

shapley::TreeEnsemble random_ensemble(std::mt19937_64& rng, std::size_t d, std::size_t n_trees, std::size_t max_depth) {
  shapley::TreeEnsemble e;
  e.base_score = std::normal_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t t = 0; t < n_trees; ++t) e.trees.push_back(random_tree(rng, d, max_depth));
  return e;
}

shapley::LinearModel random_linear(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 2.0);
  shapley::LinearModel m;
  for (std::size_t i = 0; i < d; ++i) m.beta.push_back(n(rng));
  m.beta0 = n(rng);
  return m;
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(d);
  for (double& v : x) v = n(rng);
  return x;
}

namespace {

double leaf_sum(const shapley::Tree& tree, std::size_t index, const std::vector<double>& x_e,
                const std::set<std::size_t>& present, double weight) {
  const auto& node = tree.nodes[index];
  if (node.feature < 0) return weight * node.leaf_value;
  const auto f = static_cast<std::size_t>(node.feature);
  const auto l = static_cast<std::size_t>(node.left);
  const auto r = static_cast<std::size_t>(node.right);
  if (present.count(f)) {
    return leaf_sum(tree, x_e[f] <= node.threshold ? l : r, x_e, present, weight);
  }
  const double total = tree.nodes[l].cover + tree.nodes[r].cover;
  return leaf_sum(tree, l, x_e, present, weight * tree.nodes[l].cover / total) +
         leaf_sum(tree, r, x_e, present, weight * tree.nodes[r].cover / total);
}

}  // namespace

double traversal_game(const shapley::TreeEnsemble& model, const std::vector<double>& x_e,
                      const std::set<std::size_t>& present) {
  double out = model.base_score;
  for (const auto& tree : model.trees) out += leaf_sum(tree, 0, x_e, present, 1.0);
  return out;
}

double multilinear_g(const std::vector<double>& table, std::size_t d, std::size_t i, double q) {
  double g = 0.0;
  const std::uint64_t bit = std::uint64_t{1} << i;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    if (mask & bit) continue;
    const int size = std::popcount(mask);
    const double p = std::pow(q, size) * std::pow(1.0 - q, static_cast<double>(d - 1) - size);
    g += p * (table[mask | bit] - table[mask]);
  }
  return g;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace testing_support
