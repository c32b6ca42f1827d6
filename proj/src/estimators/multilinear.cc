#include <cmath>
#include <numeric>
#include <string>

#include "internal.hpp"

namespace shapley {

using internal::Meter;
using internal::Recorder;
using internal::RunningStats;

std::vector<double> trapezoid_cycle(std::size_t q_nodes) {
  const std::size_t len = 2 * q_nodes + 2;
  std::vector<double> slots;
  slots.reserve(len);
  slots.push_back(0.0);
  for (std::size_t k = 1; k <= q_nodes; ++k) {
    const double q = static_cast<double>(k) / static_cast<double>(q_nodes + 1);
    slots.push_back(q);
    slots.push_back(q);
  }
  slots.push_back(1.0);
  // A stride coprime to the cycle length spreads consecutive draws over [0, 1].
  auto stride = static_cast<std::size_t>(std::llround(static_cast<double>(len) * 0.6180339887498949));
  if (stride == 0) stride = 1;
  while (std::gcd(stride, len) != 1) ++stride;
  std::vector<double> order(len);
  for (std::size_t j = 0; j < len; ++j) order[j] = slots[(j * stride) % len];
  return order;
}

EstimateTrace multilinear(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                          const MultilinearOptions& options) {
  const std::size_t d = game.num_players();
  if (options.adaptive && !options.feature_wise) {
    throw ConfigError("adaptive multilinear sampling requires feature-wise mode");
  }
  const std::uint64_t variant = (options.feature_wise ? 1 : 0) | (options.antithetic ? 2 : 0) |
                                (options.adaptive ? 4 : 0) |
                                (options.sampling == QSampling::kRandom ? 8 : 0);
  CounterRng rng = internal::make_rng(seed, internal::StreamId::kMultilinear, variant);
  const std::vector<double> cycle =
      options.sampling == QSampling::kTrapezoid ? trapezoid_cycle(options.q_nodes) : std::vector<double>{};
  auto next_q = [&](std::uint64_t unit, CounterRng& r) {
    return cycle.empty() ? r.uniform() : cycle[unit % cycle.size()];
  };

  if (options.feature_wise) {
    internal::SubsetDraw draw = [&, d](std::size_t player, std::uint64_t unit, CounterRng& r) {
      const double q = next_q(unit, r);
      return internal::bernoulli_coalition(d, q, Coalition::full(d).without(player), r);
    };
    internal::FeatureWisePlan plan{options.antithetic, options.adaptive, options.pilot};
    return internal::run_feature_wise(game, budget, rng, plan, draw, "multilinear");
  }

  const std::uint64_t per_coalition = d + 1;
  const std::uint64_t unit_cost = options.antithetic ? 2 * per_coalition : per_coalition;
  if (budget.max_evals < 2 + unit_cost) {
    throw BudgetError("multilinear needs at least " + std::to_string(2 + unit_cost) + " evaluations for d=" +
                      std::to_string(d) + ", got " + std::to_string(budget.max_evals));
  }
  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);
  const Coalition everyone = Coalition::full(d);
  const double v_empty = meter(Coalition::empty(d));
  const double v_full = meter(everyone);
  std::vector<RunningStats> stats(d);
  std::vector<double> contrib(d);
  std::vector<double> paired(d);

  auto contributions = [&](const Coalition& g, std::vector<double>& out) {
    const double base = meter(g);
    for (std::size_t i = 0; i < d; ++i) {
      const Coalition t = g;
      if (g.contains(i)) {
        out[i] = base - meter(t.without(i));
      } else {
        out[i] = meter(t.with(i)) - base;
      }
    }
  };
  auto make = [&] { return internal::snapshot_from_stats(stats, v_empty, v_full, meter.used()); };

  for (std::uint64_t unit = 0; meter.affords(unit_cost); ++unit) {
    const double q = next_q(unit, rng);
    const Coalition g = internal::bernoulli_coalition(d, q, everyone, rng);
    contributions(g, contrib);
    if (options.antithetic) {
      contributions(everyone - g, paired);
      for (std::size_t i = 0; i < d; ++i) stats[i].add(0.5 * (contrib[i] + paired[i]));
    } else {
      for (std::size_t i = 0; i < d; ++i) stats[i].add(contrib[i]);
    }
    recorder.offer(meter.used(), true, make);
  }
  recorder.finish(meter.used(), true, make);
  return trace;
}

}  // namespace shapley
