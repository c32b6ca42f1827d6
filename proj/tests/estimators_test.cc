#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/game_core.hpp"
#include "shapley/removal.hpp"
#include "support/oracles.hpp"

namespace shapley {
namespace {

using testing_support::additive_game;
using testing_support::random_ensemble;
using testing_support::random_point;

const std::vector<double> kAdditive = {1.5, -0.5, 2.0, 0.0, 3.25};

std::unique_ptr<TabulatedGame> tree_game(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const TreeEnsemble model = random_ensemble(rng, d, 30, 5);
  const auto xe = random_point(rng, d), xb = random_point(rng, d);
  return TabulatedGame::from(*baseline_game(model, xe, xb));
}

double scale_of(const AttributionVector& a) {
  return std::max({1.0, std::abs(a.v_full), std::abs(a.v_empty)});
}

void expect_efficient(const EstimateTrace& trace) {
  ASSERT_FALSE(trace.empty());
  for (const Snapshot& s : trace.snapshots) {
    EXPECT_LE(std::abs(s.estimate.efficiency_gap()), 1e-9 * scale_of(s.estimate)) << "checkpoint " << s.checkpoint;
  }
}

void expect_exact(const EstimateTrace& trace, const std::vector<double>& c, double tol) {
  ASSERT_FALSE(trace.empty());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(trace.last().estimate.phi[i], c[i], tol) << i;
}

Budget budget_with(std::uint64_t max, std::vector<std::uint64_t> checkpoints) { return Budget{max, std::move(checkpoints)}; }

TEST(BudgetTest, Validation) {
  EXPECT_NO_THROW(budget_with(100, {10, 50, 100}).validate());
  EXPECT_THROW(budget_with(100, {10, 10}).validate(), ConfigError);
  EXPECT_THROW(budget_with(100, {50, 10}).validate(), ConfigError);
  EXPECT_THROW(budget_with(100, {101}).validate(), ConfigError);
  EXPECT_EQ(budget_with(70, {}).effective_checkpoints(), (std::vector<std::uint64_t>{70}));
}

TEST(SemivalueTest, AdditiveGameHasZeroVariance) {
  auto game = additive_game(kAdditive);
  for (std::size_t i = 0; i < kAdditive.size(); ++i) {
    const EstimateTrace trace = sample_semivalue(*game, i, Budget::single(40), 3);
    ASSERT_EQ(trace.snapshots.size(), 1U);
    EXPECT_EQ(trace.last().estimate.phi[i], kAdditive[i]);
    EXPECT_EQ(trace.last().variance[i], 0.0);
    EXPECT_EQ(trace.last().counts[i], 20U);
  }
}

TEST(SemivalueTest, TwoEvaluationsRecordOneContribution) {
  auto game = tree_game(6, 1);
  const EstimateTrace trace = sample_semivalue(*game, 2, Budget::single(2), 9);
  ASSERT_EQ(trace.snapshots.size(), 1U);
  EXPECT_EQ(trace.last().counts[2], 1U);
  EXPECT_TRUE(std::isnan(trace.last().variance[2]));
  EXPECT_EQ(trace.evals_used, 2U);
}

TEST(SemivalueTest, ZeroBudgetGivesEmptyTrace) {
  auto game = tree_game(4, 2);
  const EstimateTrace trace = sample_semivalue(*game, 0, Budget{0, {}}, 1);
  EXPECT_TRUE(trace.empty());
  EXPECT_EQ(trace.evals_used, 0U);
}

TEST(ApproShapleyTest, EfficientAtEverySnapshot) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto game = testing_support::random_game(7, seed);
    for (bool anti : {false, true}) {
      expect_efficient(appro_shapley(*game, budget_with(2000, {16, 100, 333, 1000, 2000}), seed, anti));
    }
  }
}

TEST(ApproShapleyTest, AdditiveGameExactAfterOneWalk) {
  auto game = additive_game(kAdditive);
  expect_exact(appro_shapley(*game, Budget::single(6), 1), kAdditive, 1e-12);
  expect_exact(appro_shapley(*game, Budget::single(12), 1, true), kAdditive, 1e-12);
}

TEST(ApproShapleyTest, BudgetBelowOneWalkThrows) {
  auto game = additive_game(kAdditive);
  EXPECT_THROW(appro_shapley(*game, Budget::single(5), 1), BudgetError);
  EXPECT_THROW(appro_shapley(*game, Budget::single(11), 1, true), BudgetError);
}

TEST(ApproShapleyTest, SameSeedSameTrace) {
  auto game = tree_game(8, 3);
  const auto a = appro_shapley(*game, Budget::single(900), 42);
  const auto b = appro_shapley(*game, Budget::single(900), 42);
  EXPECT_EQ(a.last().estimate.phi, b.last().estimate.phi);
  const auto c = appro_shapley(*game, Budget::single(900), 43);
  EXPECT_NE(a.last().estimate.phi, c.last().estimate.phi);
}

TEST(ImeTest, AdditiveGameExact) {
  auto game = additive_game(kAdditive);
  for (bool anti : {false, true}) {
    for (bool adaptive : {false, true}) {
      expect_exact(ime(*game, Budget::single(400), 5, {anti, adaptive, 4}), kAdditive, 1e-12);
    }
  }
}

TEST(ImeTest, RequiresOneContributionPerPlayer) {
  auto game = additive_game(kAdditive);
  EXPECT_THROW(ime(*game, Budget::single(2 * kAdditive.size()), 1), BudgetError);
  EXPECT_NO_THROW(ime(*game, Budget::single(2 + 2 * kAdditive.size()), 1));
}

TEST(ImeTest, AdaptiveGivesDummyOnlyThePilot) {
  // Player 3 never changes the value.
  auto base = testing_support::random_game(5, 4);
  FunctionGame game(5, [&](const Coalition& s) {
    Coalition t = s;
    t.erase(3);
    return base->evaluate(t);
  });
  const ImeOptions options{false, true, 6};
  const EstimateTrace trace = ime(game, Budget::single(2000), 11, options);
  const Snapshot& last = trace.last();
  EXPECT_EQ(last.counts[3], 6U);
  EXPECT_EQ(last.estimate.phi[3], 0.0);
  for (std::size_t i : {0U, 1U, 2U, 4U}) EXPECT_GT(last.counts[i], 6U);
}

TEST(AllocateProportionalTest, Examples) {
  EXPECT_EQ(allocate_proportional({1.0, 1.0, 1.0, 1.0}, 12), (std::vector<std::uint64_t>{3, 3, 3, 3}));
  EXPECT_EQ(allocate_proportional({1.0, 1.0, 1.0}, 4), (std::vector<std::uint64_t>{2, 1, 1}));
  EXPECT_EQ(allocate_proportional({0.0, 0.0}, 5), (std::vector<std::uint64_t>{3, 2}));
  EXPECT_EQ(allocate_proportional({3.0, 0.0, 1.0}, 8), (std::vector<std::uint64_t>{6, 0, 2}));
  const auto out = allocate_proportional({0.3, 2.7, 1.1, 0.05, 4.4}, 997);
  EXPECT_EQ(std::accumulate(out.begin(), out.end(), std::uint64_t{0}), 997U);
}

TEST(KernelShapTest, ExhaustiveWeightedSystemMatchesBruteForce) {
  for (std::size_t d : {2U, 3U, 6U, 10U}) {
    auto game = tree_game(d, 100 + d);
    const auto truth = brute_force_shapley(*game);
    WlsSystem system(d, game->evaluate(Coalition::empty(d)), game->evaluate(Coalition::full(d)));
    const std::uint64_t full = (std::uint64_t{1} << d) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      const Coalition s = Coalition::from_mask(d, mask);
      system.add(s, kernel_weight(s.size(), d), game->evaluate(s), mask);
    }
    const WlsSolution solution = system.solve();
    EXPECT_FALSE(solution.rank_deficient);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(solution.beta[i], truth.phi[i], 1e-6) << "d=" << d;
  }
}

TEST(KernelShapTest, RejectsEndpointRows) {
  WlsSystem system(3, 0.0, 1.0);
  EXPECT_THROW(system.add(Coalition::empty(3), 1.0, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(system.add(Coalition::full(3), 1.0, 0.0, 0), std::invalid_argument);
}

TEST(KernelShapTest, AdditiveGameRecoveredExactly) {
  auto game = additive_game(kAdditive);
  for (bool paired : {false, true}) expect_exact(kernel_shap(*game, Budget::single(60), 8, paired), kAdditive, 1e-9);
}

TEST(KernelShapTest, EfficientAtEverySnapshot) {
  auto game = tree_game(9, 5);
  for (bool paired : {false, true}) {
    expect_efficient(kernel_shap(*game, budget_with(3000, {40, 200, 1000, 3000}), 2, paired));
  }
}

TEST(KernelShapTest, SinglePlayer) {
  auto game = additive_game({2.5});
  expect_exact(kernel_shap(*game, Budget::single(10), 1), {2.5}, 0.0);
}

TEST(SgdShapleyTest, AdditiveGameConverges) {
  auto game = additive_game(kAdditive);
  expect_exact(sgd_shapley(*game, Budget::single(100000), 4, SgdOptions{10.0, 100.0}), kAdditive, 1e-2);
}

TEST(SgdShapleyTest, EfficientAtEverySnapshot) {
  auto game = tree_game(8, 6);
  const EstimateTrace trace = sgd_shapley(*game, budget_with(5000, {2, 10, 100, 5000}), 3);
  expect_efficient(trace);
  EXPECT_TRUE(std::isnan(trace.last().variance[0]));
}

TEST(SgdShapleyTest, RejectsBadInputs) {
  auto game = additive_game(kAdditive);
  EXPECT_THROW(sgd_shapley(*game, Budget::single(1), 1), BudgetError);
  EXPECT_THROW(sgd_shapley(*game, Budget::single(100), 1, SgdOptions{0.0, 10.0}), ConfigError);
}

TEST(MultilinearTest, TrapezoidCycleCoversGrid) {
  std::vector<double> cycle = trapezoid_cycle(1);
  std::sort(cycle.begin(), cycle.end());
  EXPECT_EQ(cycle, (std::vector<double>{0.0, 0.5, 0.5, 1.0}));
  cycle = trapezoid_cycle(4);
  ASSERT_EQ(cycle.size(), 10U);
  const double mean = std::accumulate(cycle.begin(), cycle.end(), 0.0) / 10.0;
  EXPECT_NEAR(mean, 0.5, 1e-15);
  EXPECT_EQ(trapezoid_cycle(0), (std::vector<double>{0.0, 1.0}));
}

TEST(MultilinearTest, AdditiveGameExactForAllModes) {
  auto game = additive_game(kAdditive);
  for (QSampling sampling : {QSampling::kTrapezoid, QSampling::kRandom}) {
    for (bool fw : {false, true}) {
      for (bool anti : {false, true}) {
        for (bool adaptive : {false, true}) {
          if (adaptive && !fw) continue;
          MultilinearOptions options{sampling, fw, anti, adaptive, 3, 4};
          expect_exact(multilinear(*game, Budget::single(500), 6, options), kAdditive, 1e-12);
        }
      }
    }
  }
}

TEST(MultilinearTest, AdaptiveNeedsFeatureWise) {
  auto game = additive_game(kAdditive);
  MultilinearOptions options;
  options.adaptive = true;
  EXPECT_THROW(multilinear(*game, Budget::single(500), 1, options), ConfigError);
}

TEST(MultilinearTest, TwoPlayerTrapezoidMatchesIntegral) {
  const std::vector<double> table = {0.3, 1.2, -0.7, 2.9};
  TabulatedGame game(2, table);
  const auto truth = brute_force_shapley(game);
  for (std::size_t i = 0; i < 2; ++i) {
    const double g0 = testing_support::multilinear_g(table, 2, i, 0.0);
    const double gh = testing_support::multilinear_g(table, 2, i, 0.5);
    const double g1 = testing_support::multilinear_g(table, 2, i, 1.0);
    // g_i is linear in q for two players, so the trapezoid rule has no truncation error.
    EXPECT_NEAR(0.25 * g0 + 0.5 * gh + 0.25 * g1, truth.phi[i], 1e-12);
  }
  MultilinearOptions options;
  options.q_nodes = 1;
  const EstimateTrace trace = multilinear(game, Budget::single(300002), 12, options);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(trace.last().estimate.phi[i], truth.phi[i], 0.02);
}

struct Combo {
  std::string name;
  std::function<EstimateTrace(const CoalitionalGame&, const Budget&, std::uint64_t)> run;
};

std::vector<Combo> all_combos() {
  std::vector<Combo> out;
  out.push_back({"semivalue", [](const CoalitionalGame& g, const Budget& b, std::uint64_t s) {
                   return sample_semivalue(g, 1, b, s);
                 }});
  for (bool anti : {false, true}) {
    out.push_back({"appro", [anti](const CoalitionalGame& g, const Budget& b, std::uint64_t s) {
                     return appro_shapley(g, b, s, anti);
                   }});
    for (bool adaptive : {false, true}) {
      out.push_back({adaptive ? "ime_adaptive" : "ime", [anti, adaptive](const CoalitionalGame& g, const Budget& b, std::uint64_t s) {
                       return ime(g, b, s, {anti, adaptive, 3});
                     }});
    }
    out.push_back({"kernel", [anti](const CoalitionalGame& g, const Budget& b, std::uint64_t s) {
                     return kernel_shap(g, b, s, anti);
                   }});
  }
  out.push_back({"sgd", [](const CoalitionalGame& g, const Budget& b, std::uint64_t s) { return sgd_shapley(g, b, s); }});
  for (QSampling q : {QSampling::kTrapezoid, QSampling::kRandom}) {
    for (bool fw : {false, true}) {
      for (bool anti : {false, true}) {
        for (bool adaptive : {false, true}) {
          if (adaptive && !fw) continue;
          out.push_back({"multilinear", [=](const CoalitionalGame& g, const Budget& b, std::uint64_t s) {
                           return multilinear(g, b, s, {q, fw, anti, adaptive, 5, 3});
                         }});
        }
      }
    }
  }
  return out;
}

TEST(EstimatorContractTest, EvalsUsedMatchesGameCounter) {
  auto game = tree_game(7, 7);
  for (const Combo& combo : all_combos()) {
    for (std::uint64_t max : {100U, 777U, 2500U}) {
      const std::uint64_t before = game->eval_count();
      const EstimateTrace trace = combo.run(*game, budget_with(max, {max / 3, max / 2, max}), 17);
      EXPECT_EQ(trace.evals_used, game->eval_count() - before) << combo.name << " " << max;
      EXPECT_LE(trace.evals_used, max) << combo.name;
    }
  }
}

TEST(EstimatorContractTest, SnapshotsAreOrdered) {
  auto game = tree_game(7, 8);
  for (const Combo& combo : all_combos()) {
    const EstimateTrace trace = combo.run(*game, budget_with(3000, {300, 900, 1500, 3000}), 4);
    for (std::size_t k = 1; k < trace.snapshots.size(); ++k) {
      EXPECT_LT(trace.snapshots[k - 1].checkpoint, trace.snapshots[k].checkpoint) << combo.name;
    }
    ASSERT_FALSE(trace.empty()) << combo.name;
    EXPECT_EQ(trace.last().checkpoint, 3000U) << combo.name;
  }
}

TEST(EstimatorContractTest, UnbiasedOnFixedGame) {
  auto game = tree_game(10, 9);
  const auto truth = brute_force_shapley(*game);
  const std::size_t trials = 200;
  std::vector<Combo> unbiased;
  for (const Combo& c : all_combos()) {
    // The adaptive allocation depends on the pilot draws that also enter the mean.
    if (c.name != "sgd" && c.name != "semivalue" && c.name != "ime_adaptive") unbiased.push_back(c);
  }
  for (const Combo& combo : unbiased) {
    if (combo.name == "multilinear") continue;
    std::vector<std::vector<double>> columns(10);
    for (std::size_t t = 0; t < trials; ++t) {
      const EstimateTrace trace = combo.run(*game, Budget::single(2200), 1000 + t);
      for (std::size_t i = 0; i < 10; ++i) columns[i].push_back(trace.last().estimate.phi[i]);
    }
    for (std::size_t i = 0; i < 10; ++i) {
      const double se = testing_support::stddev(columns[i]) / std::sqrt(static_cast<double>(trials));
      EXPECT_NEAR(testing_support::mean(columns[i]), truth.phi[i], 4.0 * se + 1e-12) << combo.name << " " << i;
    }
  }
  // Random q is unbiased; the trapezoid grid is not.
  for (bool fw : {false, true}) {
    std::vector<std::vector<double>> columns(10);
    for (std::size_t t = 0; t < trials; ++t) {
      const EstimateTrace trace = multilinear(*game, Budget::single(2200), 1000 + t, {QSampling::kRandom, fw});
      for (std::size_t i = 0; i < 10; ++i) columns[i].push_back(trace.last().estimate.phi[i]);
    }
    for (std::size_t i = 0; i < 10; ++i) {
      const double se = testing_support::stddev(columns[i]) / std::sqrt(static_cast<double>(trials));
      EXPECT_NEAR(testing_support::mean(columns[i]), truth.phi[i], 4.0 * se + 1e-12) << "random_q " << i;
    }
  }
}

TEST(EstimatorContractTest, NormalizedImeAndMultilinearAreEfficient) {
  auto game = tree_game(8, 10);
  const auto a = additive_efficient_normalization(ime(*game, Budget::single(1000), 1).last().estimate);
  EXPECT_LE(std::abs(a.efficiency_gap()), 1e-9 * scale_of(a));
  const auto b = additive_efficient_normalization(multilinear(*game, Budget::single(1000), 1).last().estimate);
  EXPECT_LE(std::abs(b.efficiency_gap()), 1e-9 * scale_of(b));
}

TEST(DetectConvergenceTest, AdditiveGameStopsAtFirstEligibleSnapshot) {
  auto game = additive_game(kAdditive);
  // IME spends 2 + 5*2 evals before every player has one unit and 2 + 5*4 before two.
  const EstimateTrace trace = ime(*game, budget_with(200, {12, 22, 60, 200}), 1);
  ASSERT_EQ(trace.snapshots.size(), 4U);
  EXPECT_EQ(detect_convergence(trace, 1e-6), std::optional<std::size_t>(1));
  EXPECT_EQ(detect_convergence(trace, 0.0), std::nullopt);
}

TEST(DetectConvergenceTest, HalvingThresholdNeverStopsEarlier) {
  auto game = tree_game(8, 11);
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t c = 200; c <= 20000; c += 200) checkpoints.push_back(c);
  const EstimateTrace trace = ime(*game, budget_with(20000, checkpoints), 3);
  std::optional<std::size_t> previous = 0;
  for (double threshold = 1.0; threshold > 1e-4; threshold /= 2) {
    const auto index = detect_convergence(trace, threshold);
    if (!previous) {
      EXPECT_FALSE(index.has_value());
    } else if (index) {
      EXPECT_GE(*index, *previous);
    }
    previous = index;
  }
}

TEST(DetectConvergenceTest, SgdNeverConverges) {
  auto game = additive_game(kAdditive);
  EXPECT_EQ(detect_convergence(sgd_shapley(*game, Budget::single(100), 1), 1e9), std::nullopt);
}

TEST(AntitheticTest, PairedSamplingHelpsOnTreeGame) {
  auto game = tree_game(10, 12);
  const auto truth = brute_force_shapley(*game);
  auto mse = [&](auto&& run) {
    double total = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const std::vector<double> phi = run(t).last().estimate.phi;
      for (std::size_t i = 0; i < 10; ++i) total += (phi[i] - truth.phi[i]) * (phi[i] - truth.phi[i]);
    }
    return total;
  };
  const double plain = mse([&](std::uint64_t t) { return appro_shapley(*game, Budget::single(10000), t, false); });
  const double anti = mse([&](std::uint64_t t) { return appro_shapley(*game, Budget::single(10000), t, true); });
  EXPECT_GT(plain, 1e-8);
  EXPECT_LE(anti, 1.1 * plain);
}

}  // namespace
}  // namespace shapley
