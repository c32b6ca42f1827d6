#include "shapley/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "shapley/errors.hpp"
#include "shapley/random.hpp"

namespace shapley {
namespace {

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const DataMatrix& x, std::span<const double> residual, const BoostingConfig& cfg)
      : x_(x), residual_(residual), cfg_(cfg) {}

  Tree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::size_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    const std::size_t index = tree_.nodes.size();
    tree_.nodes.emplace_back();
    double sum = 0.0;
    for (std::size_t r : rows) sum += residual_[r];
    const auto count = static_cast<double>(rows.size());
    tree_.nodes[index].cover = count;

    Split split;
    if (depth < cfg_.max_depth && rows.size() >= 2 * cfg_.min_samples) split = best_split(rows, sum);
    if (split.feature < 0) {
      tree_.nodes[index].leaf_value = cfg_.learning_rate * sum / count;
      return index;
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    const auto f = static_cast<std::size_t>(split.feature);
    for (std::size_t r : rows) (x_(r, f) <= split.threshold ? left_rows : right_rows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[index].feature = split.feature;
    tree_.nodes[index].threshold = split.threshold;
    const std::size_t left = grow(std::move(left_rows), depth + 1);
    const std::size_t right = grow(std::move(right_rows), depth + 1);
    tree_.nodes[index].left = static_cast<std::int32_t>(left);
    tree_.nodes[index].right = static_cast<std::int32_t>(right);
    return index;
  }

  Split best_split(const std::vector<std::size_t>& rows, double total) const {
    const std::size_t n = rows.size();
    const double parent_score = total * total / static_cast<double>(n);
    Split best;
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return x_(a, f) < x_(b, f); });
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += residual_[order[k]];
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < cfg_.min_samples) continue;
        if (n_right < cfg_.min_samples) break;
        const double lo = x_(order[k], f);
        const double hi = x_(order[k + 1], f);
        if (!(lo < hi)) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) - parent_score;
        if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(parent_score))) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = Split{static_cast<std::int32_t>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  const DataMatrix& x_;
  std::span<const double> residual_;
  const BoostingConfig& cfg_;
  Tree tree_;
};

}  // namespace

TreeEnsemble train_boosted_trees(const DataMatrix& x, std::span<const double> y,
                                 const BoostingConfig& cfg) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw DataError("targets length " + std::to_string(y.size()) + " != rows " + std::to_string(n));
  if (cfg.min_samples == 0) throw ConfigError("min_samples must be positive");
  if (n < 2 * cfg.min_samples) {
    throw DataError("need at least 2*min_samples = " + std::to_string(2 * cfg.min_samples) +
                    " rows, got " + std::to_string(n));
  }
  if (!(cfg.subsample > 0.0 && cfg.subsample <= 1.0)) throw ConfigError("subsample must lie in (0, 1]");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");

  TreeEnsemble ensemble;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
  if (constant) {
    ensemble.base_score = y.front();
    Tree leaf;
    leaf.nodes.push_back(TreeNode{.cover = static_cast<double>(n)});
    ensemble.trees.push_back(std::move(leaf));
    return ensemble;
  }
  ensemble.base_score = mean;

  std::vector<double> prediction(n, mean);
  std::vector<double> residual(n);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const auto sample_size = std::max<std::size_t>(
      2 * cfg.min_samples, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));

  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    for (std::size_t r = 0; r < n; ++r) residual[r] = y[r] - prediction[r];
    std::vector<std::size_t> rows = all_rows;
    if (sample_size < n) {
      CounterRng rng(mix_key({cfg.seed, 0x7472656573ULL, t}));
      rng.shuffle(std::span<std::size_t>(rows));
      rows.resize(sample_size);
      std::sort(rows.begin(), rows.end());
    }
    TreeBuilder builder(x, residual, cfg);
    Tree tree = builder.build(std::move(rows));
    for (std::size_t r = 0; r < n; ++r) prediction[r] += tree.predict(x.row(r));
    ensemble.trees.push_back(std::move(tree));
  }
  return ensemble;
}

LinearModel fit_linear_model(const DataMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (y.size() != n) throw DataError("targets length mismatch");
  if (n == 0) throw DataError("cannot fit a linear model on zero rows");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    design(ri, 0) = 1.0;
    for (std::size_t c = 0; c < d; ++c) design(ri, static_cast<Eigen::Index>(c + 1)) = x(r, c);
    target(ri) = y[r];
  }
  const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
  LinearModel model;
  model.beta0 = coef(0);
  model.beta.resize(d);
  for (std::size_t c = 0; c < d; ++c) model.beta[c] = coef(static_cast<Eigen::Index>(c + 1));
  return model;
}

}  // namespace shapley
