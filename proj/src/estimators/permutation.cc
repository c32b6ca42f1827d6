#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"

namespace shapley {

using internal::Meter;
using internal::Recorder;
using internal::RunningStats;

EstimateTrace sample_semivalue(const CoalitionalGame& game, std::size_t player, const Budget& budget,
                               std::uint64_t seed) {
  const std::size_t d = game.num_players();
  if (player >= d) throw ConfigError("player " + std::to_string(player) + " out of range for d=" + std::to_string(d));
  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);
  CounterRng rng = internal::make_rng(seed, internal::StreamId::kSemivalue, player);
  RunningStats stats;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto make = [&] {
    Snapshot snap;
    snap.estimate.phi.assign(d, 0.0);
    snap.estimate.phi[player] = stats.estimate();
    snap.estimate.evals_used = meter.used();
    snap.variance.assign(d, nan);
    snap.variance[player] = stats.variance();
    snap.counts.assign(d, 0);
    snap.counts[player] = stats.count;
    return snap;
  };
  while (meter.affords(2)) {
    const std::vector<std::size_t> perm = internal::random_permutation(d, rng);
    Coalition s(d);
    for (std::size_t p : perm) {
      if (p == player) break;
      s.insert(p);
    }
    stats.add(meter(s.with(player)) - meter(s));
    recorder.offer(meter.used(), true, make);
  }
  recorder.finish(meter.used(), stats.count > 0, make);
  return trace;
}

EstimateTrace appro_shapley(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed, bool antithetic) {
  const std::size_t d = game.num_players();
  const std::uint64_t walk = d + 1;
  const std::uint64_t unit_cost = antithetic ? 2 * walk : walk;
  if (budget.max_evals < unit_cost) {
    throw BudgetError("appro_shapley needs at least " + std::to_string(unit_cost) + " evaluations for d=" +
                      std::to_string(d) + ", got " + std::to_string(budget.max_evals));
  }
  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);
  CounterRng rng = internal::make_rng(seed, internal::StreamId::kApproShapley, antithetic ? 1 : 0);
  std::vector<RunningStats> stats(d);
  double v_empty = 0.0;
  double v_full = 0.0;
  std::vector<double> contrib(d);
  std::vector<double> paired(d);

  auto run_walk = [&](const std::vector<std::size_t>& order, std::vector<double>& out) {
    Coalition s(d);
    double prev = meter(s);
    v_empty = prev;
    for (std::size_t p : order) {
      s.insert(p);
      const double cur = meter(s);
      out[p] = cur - prev;
      prev = cur;
    }
    v_full = prev;
  };
  auto make = [&] { return internal::snapshot_from_stats(stats, v_empty, v_full, meter.used()); };

  while (meter.affords(unit_cost)) {
    std::vector<std::size_t> perm = internal::random_permutation(d, rng);
    run_walk(perm, contrib);
    if (antithetic) {
      std::reverse(perm.begin(), perm.end());
      run_walk(perm, paired);
      for (std::size_t i = 0; i < d; ++i) stats[i].add(0.5 * (contrib[i] + paired[i]));
    } else {
      for (std::size_t i = 0; i < d; ++i) stats[i].add(contrib[i]);
    }
    recorder.offer(meter.used(), true, make);
  }
  recorder.finish(meter.used(), true, make);
  return trace;
}

EstimateTrace ime(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed, const ImeOptions& options) {
  const std::size_t d = game.num_players();
  const std::uint64_t variant = (options.antithetic ? 1 : 0) | (options.adaptive ? 2 : 0);
  CounterRng rng = internal::make_rng(seed, internal::StreamId::kIme, variant);
  internal::SubsetDraw draw = [d](std::size_t player, std::uint64_t, CounterRng& r) {
    Coalition s(d);
    for (std::size_t p : internal::random_permutation(d, r)) {
      if (p == player) break;
      s.insert(p);
    }
    return s;
  };
  internal::FeatureWisePlan plan{options.antithetic, options.adaptive, options.pilot};
  return internal::run_feature_wise(game, budget, rng, plan, draw, "ime");
}

}  // namespace shapley
