#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "internal.hpp"

namespace shapley {

void Budget::validate() const {
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] > max_evals) {
      throw ConfigError("checkpoint " + std::to_string(checkpoints[k]) + " exceeds max_evals " +
                        std::to_string(max_evals));
    }
    if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) throw ConfigError("checkpoints must be strictly increasing");
  }
}

std::vector<std::uint64_t> Budget::effective_checkpoints() const {
  validate();
  if (checkpoints.empty()) return {max_evals};
  return checkpoints;
}

std::vector<double> Snapshot::standard_errors() const {
  std::vector<double> out(variance.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = counts[i] == 0 ? std::numeric_limits<double>::quiet_NaN()
                            : std::sqrt(variance[i] / static_cast<double>(counts[i]));
  }
  return out;
}

const Snapshot* EstimateTrace::at(std::uint64_t checkpoint) const {
  for (const Snapshot& s : snapshots) {
    if (s.checkpoint == checkpoint) return &s;
  }
  return nullptr;
}

std::vector<std::uint64_t> allocate_proportional(const std::vector<double>& weights, std::uint64_t total) {
  const std::size_t n = weights.size();
  std::vector<std::uint64_t> out(n, 0);
  if (n == 0) return out;
  double sum = 0.0;
  bool usable = true;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) usable = false;
    sum += w;
  }
  std::vector<double> w = weights;
  if (!usable || !(sum > 0.0)) {
    std::fill(w.begin(), w.end(), 1.0);
    sum = static_cast<double>(n);
  }
  std::vector<double> remainder(n);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = static_cast<double>(total) * w[i] / sum;
    out[i] = static_cast<std::uint64_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += out[i];
  }
  // Rounding of the quotas can overshoot by one in pathological cases.
  while (assigned > total) {
    const auto it = std::max_element(out.begin(), out.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
    ++out[order[k]];
    ++assigned;
  }
  return out;
}

std::optional<std::size_t> detect_convergence(const EstimateTrace& trace, double threshold) {
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const Snapshot& snap = trace.snapshots[k];
    const std::vector<double> se = snap.standard_errors();
    bool eligible = false;
    bool converged = true;
    for (std::size_t i = 0; i < se.size() && converged; ++i) {
      if (snap.counts[i] == 0) continue;
      eligible = true;
      if (snap.counts[i] < 2 || !std::isfinite(se[i]) || !(se[i] < threshold)) converged = false;
    }
    if (eligible && converged) return k;
  }
  return std::nullopt;
}

namespace internal {

Snapshot snapshot_from_stats(const std::vector<RunningStats>& stats, double v_empty, double v_full,
                             std::uint64_t evals) {
  Snapshot snap;
  const std::size_t d = stats.size();
  snap.estimate.phi.resize(d);
  snap.variance.resize(d);
  snap.counts.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    snap.estimate.phi[i] = stats[i].estimate();
    snap.variance[i] = stats[i].variance();
    snap.counts[i] = stats[i].count;
  }
  snap.estimate.v_empty = v_empty;
  snap.estimate.v_full = v_full;
  snap.estimate.evals_used = evals;
  return snap;
}

bool all_players_covered(const std::vector<RunningStats>& stats) {
  return std::all_of(stats.begin(), stats.end(), [](const RunningStats& s) { return s.count > 0; });
}

std::vector<std::size_t> random_permutation(std::size_t d, CounterRng& rng) {
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

Coalition bernoulli_coalition(std::size_t d, double q, const Coalition& candidates, CounterRng& rng) {
  Coalition s(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (candidates.contains(i) && rng.bernoulli(q)) s.insert(i);
  }
  return s;
}

EstimateTrace run_feature_wise(const CoalitionalGame& game, const Budget& budget, CounterRng& rng,
                               const FeatureWisePlan& plan, const SubsetDraw& draw, const char* name) {
  const std::size_t d = game.num_players();
  const std::uint64_t unit_cost = plan.antithetic ? 4 : 2;
  const std::uint64_t minimum = 2 + d * unit_cost;
  if (budget.max_evals < minimum) {
    throw BudgetError(std::string(name) + " needs at least " + std::to_string(minimum) + " evaluations for d=" +
                      std::to_string(d) + ", got " + std::to_string(budget.max_evals));
  }
  if (plan.adaptive && plan.pilot == 0) throw ConfigError("adaptive sampling needs a pilot of at least one unit");

  EstimateTrace trace;
  Recorder recorder(budget, trace);
  Meter meter(game, budget.max_evals);
  const double v_empty = meter(Coalition::empty(d));
  const double v_full = meter(Coalition::full(d));
  std::vector<RunningStats> stats(d);
  const Coalition everyone = Coalition::full(d);

  auto make = [&] { return snapshot_from_stats(stats, v_empty, v_full, meter.used()); };
  auto run_unit = [&](std::size_t i) {
    const Coalition s = draw(i, stats[i].count, rng);
    double c = meter(s.with(i)) - meter(s);
    if (plan.antithetic) {
      const Coalition t = (everyone - s).without(i);
      c = 0.5 * (c + meter(t.with(i)) - meter(t));
    }
    stats[i].add(c);
    recorder.offer(meter.used(), all_players_covered(stats), make);
  };

  const std::uint64_t total_units = (budget.max_evals - 2) / unit_cost;
  if (!plan.adaptive) {
    for (std::uint64_t k = 0; k < total_units; ++k) run_unit(static_cast<std::size_t>(k % d));
  } else {
    const std::uint64_t pilot_units = std::min<std::uint64_t>(plan.pilot * d, total_units);
    for (std::uint64_t k = 0; k < pilot_units; ++k) run_unit(static_cast<std::size_t>(k % d));
    std::vector<double> spread(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double var = stats[i].variance();
      spread[i] = std::isfinite(var) ? std::sqrt(std::max(var, 0.0)) : 1.0;
    }
    const std::vector<std::uint64_t> alloc = allocate_proportional(spread, total_units - pilot_units);
    const std::uint64_t rounds = alloc.empty() ? 0 : *std::max_element(alloc.begin(), alloc.end());
    for (std::uint64_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < d; ++i) {
        if (alloc[i] > r) run_unit(i);
      }
    }
  }
  recorder.finish(meter.used(), all_players_covered(stats), make);
  return trace;
}

}  // namespace internal
}  // namespace shapley
