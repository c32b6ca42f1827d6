#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shapley/errors.hpp"
#include "shapley/game_core.hpp"
#include "shapley/removal.hpp"
#include "support/oracles.hpp"

namespace shapley {
namespace {

using testing_support::random_ensemble;
using testing_support::random_linear;
using testing_support::random_point;

DataMatrix random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  DataMatrix m;
  for (std::size_t r = 0; r < n; ++r) m.push_row(random_point(rng, d));
  return m;
}

TEST(ComposeTest, SelectsExplicandOnCoalition) {
  const std::vector<double> xe = {1, 2, 3}, xb = {9, 9, 9};
  EXPECT_EQ(compose(xe, xb, Coalition::of(3, {0, 2})), (std::vector<double>{1, 9, 3}));
  EXPECT_EQ(compose(xe, xb, Coalition::full(3)), xe);
  EXPECT_EQ(compose(xe, xb, Coalition::empty(3)), xb);
}

TEST(BaselineGameTest, EndpointsAndLinearAlgebra) {
  std::mt19937_64 rng(1);
  const LinearModel m = random_linear(rng, 5);
  const auto xe = random_point(rng, 5), xb = random_point(rng, 5);
  auto game = baseline_game(m, xe, xb);
  EXPECT_EQ(game->evaluate(Coalition::full(5)), m.predict(xe));
  EXPECT_EQ(game->evaluate(Coalition::empty(5)), m.predict(xb));
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    double expected = m.beta0;
    for (std::size_t i = 0; i < 5; ++i) expected += m.beta[i] * ((mask >> i) & 1U ? xe[i] : xb[i]);
    EXPECT_NEAR(game->evaluate(Coalition::from_mask(5, mask)), expected, 1e-12);
  }
}

TEST(BaselineGameTest, IdenticalInputsGiveZeroAttribution) {
  std::mt19937_64 rng(2);
  const TreeEnsemble e = random_ensemble(rng, 6, 4, 4);
  const auto x = random_point(rng, 6);
  auto game = baseline_game(e, x, x);
  for (double v : brute_force_shapley(*game).phi) EXPECT_EQ(v, 0.0);
}

TEST(BaselineGameTest, RejectsMismatchedInputs) {
  const LinearModel m{{1.0, 2.0}, 0.0};
  EXPECT_THROW(baseline_game(m, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), DataError);
  EXPECT_THROW(baseline_game(m, std::vector<double>{1.0, NAN}, std::vector<double>{1.0, 2.0}), DataError);
}

TEST(MarginalGameTest, SingleBaselineMatchesBaselineGame) {
  std::mt19937_64 rng(3);
  const TreeEnsemble e = random_ensemble(rng, 5, 3, 3);
  const auto xe = random_point(rng, 5), xb = random_point(rng, 5);
  auto a = baseline_game(e, xe, xb);
  auto b = marginal_game(e, xe, BaselineSet(std::span<const double>(xb)));
  for (std::uint64_t mask = 0; mask < 32; ++mask) {
    EXPECT_EQ(a->evaluate(Coalition::from_mask(5, mask)), b->evaluate(Coalition::from_mask(5, mask)));
  }
}

TEST(MarginalGameTest, ShapleyIsMeanOfBaselineShapley) {
  std::mt19937_64 rng(4);
  for (std::size_t d : {3u, 6u, 8u}) {
    const TreeEnsemble e = random_ensemble(rng, d, 4, 4);
    const auto xe = random_point(rng, d);
    const BaselineSet baselines(random_rows(rng, 5, d));
    auto game = marginal_game(e, xe, baselines);
    const std::uint64_t before = game->eval_count();
    const AttributionVector phi = brute_force_shapley(*game);
    EXPECT_EQ(game->eval_count() - before, std::uint64_t{1} << d);
    std::vector<double> avg(d, 0.0);
    for (std::size_t b = 0; b < baselines.size(); ++b) {
      const auto single = brute_force_shapley(*baseline_game(e, xe, baselines.row(b)));
      for (std::size_t i = 0; i < d; ++i) avg[i] += single.phi[i] / 5.0;
    }
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(phi.phi[i], avg[i], 1e-9);
  }
}

TEST(MarginalGameTest, LinearModelClosedForm) {
  std::mt19937_64 rng(5);
  const LinearModel m = random_linear(rng, 6);
  const auto xe = random_point(rng, 6);
  const BaselineSet baselines(random_rows(rng, 7, 6));
  const auto mu = baselines.column_means();
  const AttributionVector phi = brute_force_shapley(*marginal_game(m, xe, baselines));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(phi.phi[i], m.beta[i] * (xe[i] - mu[i]), 1e-10);
}

TEST(UniformGameTest, FullCoalitionAndConstantColumn) {
  std::mt19937_64 rng(6);
  const LinearModel m = random_linear(rng, 3);
  const auto xe = random_point(rng, 3);
  DataMatrix rows = random_rows(rng, 4, 3);
  for (std::size_t r = 0; r < 4; ++r) rows(r, 1) = 2.5;
  auto game = uniform_game(m, xe, BaselineSet(rows), 1, 64);
  EXPECT_EQ(game->evaluate(Coalition::full(3)), m.predict(xe));
  // Feature 1 absent, others present: the only randomness is a constant column.
  std::vector<double> z = xe;
  z[1] = 2.5;
  EXPECT_NEAR(game->evaluate(Coalition::of(3, {0, 2})), m.predict(z), 1e-12);
  EXPECT_THROW(uniform_game(m, xe, BaselineSet(std::span<const double>(xe)), 1), DataError);
}

TEST(UniformGameTest, ConvergesToAnalyticMean) {
  const LinearModel m{{1.0, -2.0, 0.5}, 0.25};
  const std::vector<double> xe = {0.3, 0.3, 0.3};
  DataMatrix rows;
  rows.push_row(std::vector<double>{-1.0, 0.0, 2.0});
  rows.push_row(std::vector<double>{3.0, 1.0, 4.0});
  const std::size_t n = 100000;
  auto game = uniform_game(m, xe, BaselineSet(rows), 9, n);
  const Coalition s = Coalition::of(3, {0});
  // E = beta0 + 1*0.3 - 2*0.5 + 0.5*3 ; sd of the draw mean from the uniform variances.
  const double expected = 0.25 + 0.3 - 2.0 * 0.5 + 0.5 * 3.0;
  const double var = 4.0 * (1.0 / 12.0) + 0.25 * (4.0 / 12.0);
  EXPECT_NEAR(game->evaluate(s), expected, 3.0 * std::sqrt(var / static_cast<double>(n)));
}

TEST(ProductMarginalsTest, SingleRowMatchesBaselineGame) {
  std::mt19937_64 rng(7);
  const TreeEnsemble e = random_ensemble(rng, 4, 3, 3);
  const auto xe = random_point(rng, 4), xb = random_point(rng, 4);
  auto a = baseline_game(e, xe, xb);
  auto b = product_marginals_game(e, xe, BaselineSet(std::span<const double>(xb)), 3, 16);
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    EXPECT_EQ(a->evaluate(Coalition::from_mask(4, mask)), b->evaluate(Coalition::from_mask(4, mask)));
  }
}

TEST(ProductMarginalsTest, AgreesWithMarginalOnLinearModel) {
  std::mt19937_64 rng(8);
  const LinearModel m = random_linear(rng, 4);
  const auto xe = random_point(rng, 4);
  const BaselineSet baselines(random_rows(rng, 200, 4));
  auto pm = product_marginals_game(m, xe, baselines, 5, 20000);
  auto mg = marginal_game(m, xe, baselines);
  double sd = 0.0;
  for (double b : m.beta) sd += b * b;
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const Coalition s = Coalition::from_mask(4, mask);
    EXPECT_NEAR(pm->evaluate(s), mg->evaluate(s), 4.0 * std::sqrt(sd / 20000.0));
  }
  EXPECT_EQ(pm->evaluate(Coalition::full(4)), m.predict(xe));
}

GaussianDistribution pair_correlated(double rho) {
  GaussianDistribution dist;
  dist.mu = Eigen::Vector3d::Zero();
  dist.sigma = Eigen::Matrix3d::Identity();
  dist.sigma(1, 2) = dist.sigma(2, 1) = rho;
  return dist;
}

TEST(ConditionalGaussianTest, DiagonalCovarianceMatchesMeanBaseline) {
  std::mt19937_64 rng(9);
  const LinearModel m = random_linear(rng, 4);
  const auto xe = random_point(rng, 4);
  GaussianDistribution dist;
  dist.mu = Eigen::Vector4d(0.5, -1.0, 2.0, 0.0);
  dist.sigma = Eigen::Vector4d(1.0, 2.0, 0.5, 3.0).asDiagonal();
  auto cg = conditional_gaussian_game(m, xe, dist, 1, 1, ConditionalMode::kExact);
  const std::vector<double> mu = {0.5, -1.0, 2.0, 0.0};
  auto bg = baseline_game(m, xe, mu);
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const Coalition s = Coalition::from_mask(4, mask);
    EXPECT_NEAR(cg->evaluate(s), bg->evaluate(s), 1e-9);
  }
}

TEST(ConditionalGaussianTest, FullCoalitionAndPurity) {
  std::mt19937_64 rng(10);
  const TreeEnsemble e = random_ensemble(rng, 3, 3, 3);
  const std::vector<double> xe = {1.0, 1.0, 1.0};
  auto game = conditional_gaussian_game(e, xe, pair_correlated(0.9), 4, 64);
  EXPECT_EQ(game->evaluate(Coalition::full(3)), e.predict(xe));
  for (std::uint64_t mask = 0; mask < 8; ++mask) {
    const Coalition s = Coalition::from_mask(3, mask);
    EXPECT_EQ(game->evaluate(s), game->evaluate(s));
  }
  EXPECT_THROW(conditional_gaussian_game(e, xe, pair_correlated(0.9), 4, 64, ConditionalMode::kExact), ConfigError);
}

TEST(ConditionalGaussianTest, SampleModeApproachesExactOnLinearModel) {
  const LinearModel m{{1.0, 1.0, 1.0}, 0.0};
  const std::vector<double> xe = {1.0, 1.0, 1.0};
  auto sampled = conditional_gaussian_game(m, xe, pair_correlated(0.7), 2, 20000);
  auto exact = conditional_gaussian_game(m, xe, pair_correlated(0.7), 2, 1, ConditionalMode::kExact);
  for (std::uint64_t mask = 0; mask < 8; ++mask) {
    const Coalition s = Coalition::from_mask(3, mask);
    EXPECT_NEAR(sampled->evaluate(s), exact->evaluate(s), 0.05);
  }
}

TEST(ConditionalGaussianTest, CorrelatedFeaturesSplitCredit) {
  const LinearModel full{{1.0, 1.0, 1.0}, 0.0};
  const std::vector<double> xe = {1.0, 1.0, 1.0};
  const auto phi =
      brute_force_shapley(*conditional_gaussian_game(full, xe, pair_correlated(0.99), 1, 1, ConditionalMode::kExact));
  EXPECT_NEAR(phi.phi[1], phi.phi[2], 1e-9);
  EXPECT_NEAR(phi.phi[0], 1.0, 1e-9);
  EXPECT_NEAR(phi.phi[1] + phi.phi[2], 2.0, 1e-9);
}

TEST(ConditionalGaussianTest, UnusedCorrelatedFeatureReceivesCredit) {
  const LinearModel partial{{1.0, 1.0, 0.0}, 0.0};
  const std::vector<double> xe = {1.0, 1.0, 1.0};
  const auto cond = brute_force_shapley(
      *conditional_gaussian_game(partial, xe, pair_correlated(0.99), 1, 1, ConditionalMode::kExact));
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  const auto marg = brute_force_shapley(*baseline_game(partial, xe, zero));
  EXPECT_LE(std::abs(marg.phi[2]), 1e-9);
  EXPECT_GT(std::abs(cond.phi[2]), 0.1 * std::abs(cond.phi[1]));
  EXPECT_GT(cond.phi[2] * cond.phi[1], 0.0);
}

TEST(EmpiricalConditionalTest, AveragesMatchingRows) {
  const LinearModel m{{1.0, 10.0}, 0.0};
  DataMatrix rows;
  rows.push_row(std::vector<double>{0.0, 1.0});
  rows.push_row(std::vector<double>{0.0, 3.0});
  rows.push_row(std::vector<double>{1.0, 5.0});
  const std::vector<double> xe = {0.0, 2.0};
  EmpiricalConditionalGame game(m, xe, BaselineSet(rows));
  EXPECT_DOUBLE_EQ(game.evaluate(Coalition::of(2, {0})), 20.0);
  EXPECT_DOUBLE_EQ(game.evaluate(Coalition::empty(2)), (10.0 + 30.0 + 51.0) / 3.0);
  EXPECT_DOUBLE_EQ(game.evaluate(Coalition::full(2)), 20.0);
  // No row has x1 = 2: falls back to all rows.
  EXPECT_DOUBLE_EQ(game.evaluate(Coalition::of(2, {1})), (20.0 + 20.0 + 21.0) / 3.0);
}

TEST(RemovalTest, EveryStrategyAgreesAtFullCoalition) {
  std::mt19937_64 rng(11);
  const TreeEnsemble e = random_ensemble(rng, 3, 5, 4);
  const std::vector<double> xe = random_point(rng, 3);
  const BaselineSet rows(random_rows(rng, 6, 3));
  const double f = e.predict(xe);
  EXPECT_EQ(baseline_game(e, xe, rows.row(0))->evaluate(Coalition::full(3)), f);
  EXPECT_EQ(marginal_game(e, xe, rows)->evaluate(Coalition::full(3)), f);
  EXPECT_EQ(uniform_game(e, xe, rows, 1)->evaluate(Coalition::full(3)), f);
  EXPECT_EQ(product_marginals_game(e, xe, rows, 1)->evaluate(Coalition::full(3)), f);
  EXPECT_EQ(conditional_gaussian_game(e, xe, pair_correlated(0.5), 1)->evaluate(Coalition::full(3)), f);
}

TEST(RemovalTest, SampledGamesArePureFunctionsOfCoalition) {
  std::mt19937_64 rng(12);
  const TreeEnsemble e = random_ensemble(rng, 4, 5, 4);
  const std::vector<double> xe = random_point(rng, 4);
  const BaselineSet rows(random_rows(rng, 6, 4));
  auto u1 = uniform_game(e, xe, rows, 77, 32);
  auto u2 = uniform_game(e, xe, rows, 77, 32);
  auto p1 = product_marginals_game(e, xe, rows, 77, 32);
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const Coalition s = Coalition::from_mask(4, mask);
    EXPECT_EQ(u1->evaluate(s), u2->evaluate(s));
    EXPECT_EQ(u1->evaluate(s), u1->evaluate(s));
    EXPECT_EQ(p1->evaluate(s), p1->evaluate(s));
  }
}

}  // namespace
}  // namespace shapley
