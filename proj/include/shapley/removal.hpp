#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "shapley/coalition.hpp"
#include "shapley/game.hpp"
#include "shapley/gaussian.hpp"
#include "shapley/matrix.hpp"
#include "shapley/models.hpp"

namespace shapley {

/// Reference samples supplying values for absent features. At least one row.
class BaselineSet {
 public:
  explicit BaselineSet(DataMatrix rows);
  /// Single-row set.
  explicit BaselineSet(std::span<const double> row);

  std::size_t size() const { return rows_.rows(); }
  std::size_t num_features() const { return rows_.cols(); }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const DataMatrix& rows() const { return rows_; }

  std::vector<double> column_means() const;
  std::vector<double> column_min() const;
  std::vector<double> column_max() const;

 private:
  DataMatrix rows_;
};

/// out_i = x_e[i] for i in s, x_b[i] otherwise.
std::vector<double> compose(std::span<const double> x_e, std::span<const double> x_b, const Coalition& s);
void compose_into(std::span<const double> x_e, std::span<const double> x_b, const Coalition& s,
                  std::span<double> out);

/// Shared state for games defined by a model and an explicand. Players are the explicand's
/// features.
class ModelGame : public CoalitionalGame {
 public:
  ModelGame(Model model, std::span<const double> x_e);

  const Model& model() const { return model_; }
  std::span<const double> explicand() const { return x_e_; }

 protected:
  double predict_composed(std::span<const double> background, const Coalition& s) const;

  Model model_;
  std::vector<double> x_e_;
};

/// v(S) = f(x_e on S, x_b elsewhere).
class BaselineGame final : public ModelGame {
 public:
  BaselineGame(Model model, std::span<const double> x_e, std::span<const double> x_b);

 protected:
  double value(const Coalition& s) const override;

 private:
  std::vector<double> x_b_;
};

/// v(S) = mean over baselines b of f(x_e on S, b elsewhere). One evaluation makes |E| model calls.
class MarginalGame final : public ModelGame {
 public:
  MarginalGame(Model model, std::span<const double> x_e, BaselineSet baselines);

 protected:
  double value(const Coalition& s) const override;

 private:
  BaselineSet baselines_;
};

/// Absent features drawn independently and uniformly over each baseline column's [min, max].
/// Draws for a coalition come from a stream keyed by (seed, S), so the game is a fixed function.
class UniformGame final : public ModelGame {
 public:
  UniformGame(Model model, std::span<const double> x_e, const BaselineSet& baselines,
              std::uint64_t seed, std::size_t n_draws);

 protected:
  double value(const Coalition& s) const override;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::uint64_t seed_;
  std::size_t n_draws_;
};

/// Absent features drawn independently from their own empirical baseline column.
class ProductMarginalsGame final : public ModelGame {
 public:
  ProductMarginalsGame(Model model, std::span<const double> x_e, BaselineSet baselines,
                       std::uint64_t seed, std::size_t n_draws);

 protected:
  double value(const Coalition& s) const override;

 private:
  BaselineSet baselines_;
  std::uint64_t seed_;
  std::size_t n_draws_;
};

enum class ConditionalMode {
  /// Average n_draws predictions with absent features ~ N(mu_{A|P}, Sigma_{A|P}).
  kSample,
  /// Evaluate f at the conditional mean; exact for linear models only.
  kExact,
};

/// v(S) = E[f(x) | x_S = x_e_S] under a multivariate Gaussian feature distribution.
class ConditionalGaussianGame final : public ModelGame {
 public:
  ConditionalGaussianGame(Model model, std::span<const double> x_e, GaussianDistribution dist,
                          std::uint64_t seed, std::size_t n_draws, ConditionalMode mode);

 protected:
  double value(const Coalition& s) const override;

 private:
  GaussianDistribution dist_;
  std::uint64_t seed_;
  std::size_t n_draws_;
  ConditionalMode mode_;
};

/// Diagnostic conditional game for discrete toy data: averages f over baseline rows that
/// match the explicand exactly on S, falling back to every row when none match.
class EmpiricalConditionalGame final : public ModelGame {
 public:
  EmpiricalConditionalGame(Model model, std::span<const double> x_e, BaselineSet baselines);

 protected:
  double value(const Coalition& s) const override;

 private:
  BaselineSet baselines_;
};

inline constexpr std::size_t kDefaultDraws = 256;

std::unique_ptr<BaselineGame> baseline_game(const Model& model, std::span<const double> x_e,
                                            std::span<const double> x_b);
std::unique_ptr<MarginalGame> marginal_game(const Model& model, std::span<const double> x_e,
                                            const BaselineSet& baselines);
/// Requires at least two baseline rows.
std::unique_ptr<UniformGame> uniform_game(const Model& model, std::span<const double> x_e,
                                          const BaselineSet& baselines, std::uint64_t seed,
                                          std::size_t n_draws = kDefaultDraws);
std::unique_ptr<ProductMarginalsGame> product_marginals_game(const Model& model, std::span<const double> x_e,
                                                             const BaselineSet& baselines, std::uint64_t seed,
                                                             std::size_t n_draws = kDefaultDraws);
std::unique_ptr<ConditionalGaussianGame> conditional_gaussian_game(
    const Model& model, std::span<const double> x_e, const GaussianDistribution& dist, std::uint64_t seed,
    std::size_t n_draws = kDefaultDraws, ConditionalMode mode = ConditionalMode::kSample);

}  // namespace shapley
