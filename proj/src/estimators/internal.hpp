#pragma once

// Bookkeeping shared by the sampling estimators. Not installed.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "shapley/errors.hpp"
#include "shapley/estimators.hpp"
#include "shapley/random.hpp"

namespace shapley::internal {

// Stream identifiers mixed into every estimator's RNG key.
enum class StreamId : std::uint64_t {
  kSemivalue = 1,
  kApproShapley = 2,
  kIme = 3,
  kKernelShap = 4,
  kSgdShapley = 5,
  kMultilinear = 6,
};

inline CounterRng make_rng(std::uint64_t seed, StreamId id, std::uint64_t variant = 0) {
  return CounterRng(mix_key({seed, static_cast<std::uint64_t>(id), variant}));
}

/// Counts evaluations against the budget.
class Meter {
 public:
  Meter(const CoalitionalGame& game, std::uint64_t max_evals) : game_(game), max_(max_evals) {}

  double operator()(const Coalition& s) {
    ++used_;
    return game_.evaluate(s);
  }
  bool affords(std::uint64_t n) const { return used_ + n <= max_; }
  std::uint64_t used() const { return used_; }
  std::uint64_t max() const { return max_; }

 private:
  const CoalitionalGame& game_;
  std::uint64_t max_;
  std::uint64_t used_ = 0;
};

/// Running mean (from the plain sum, so telescoping sums stay exact) and Welford variance.
struct RunningStats {
  std::uint64_t count = 0;
  double sum = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double estimate() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  double variance() const {
    return count < 2 ? std::numeric_limits<double>::quiet_NaN() : m2 / static_cast<double>(count - 1);
  }
};

/// Emits snapshots at checkpoint crossings.
class Recorder {
 public:
  Recorder(const Budget& budget, EstimateTrace& trace)
      : checkpoints_(budget.effective_checkpoints()), trace_(trace) {}

  template <typename Make>
  void offer(std::uint64_t evals, bool ready, Make&& make) {
    std::optional<Snapshot> snap;
    while (next_ < checkpoints_.size() && checkpoints_[next_] <= evals) {
      if (ready) {
        if (!snap) snap = make();
        push(*snap, checkpoints_[next_]);
      }
      ++next_;
    }
  }

  template <typename Make>
  void finish(std::uint64_t evals, bool ready, Make&& make) {
    trace_.evals_used = evals;
    std::optional<Snapshot> snap;
    while (next_ < checkpoints_.size()) {
      if (ready) {
        if (!snap) snap = make();
        push(*snap, checkpoints_[next_]);
      }
      ++next_;
    }
  }

 private:
  void push(const Snapshot& snap, std::uint64_t checkpoint) {
    trace_.snapshots.push_back(snap);
    trace_.snapshots.back().checkpoint = checkpoint;
  }

  std::vector<std::uint64_t> checkpoints_;
  std::size_t next_ = 0;
  EstimateTrace& trace_;
};

Snapshot snapshot_from_stats(const std::vector<RunningStats>& stats, double v_empty, double v_full,
                             std::uint64_t evals);

bool all_players_covered(const std::vector<RunningStats>& stats);

/// Uniform random permutation of 0..d-1.
std::vector<std::size_t> random_permutation(std::size_t d, CounterRng& rng);

/// Each of `candidates` included independently with probability q.
Coalition bernoulli_coalition(std::size_t d, double q, const Coalition& candidates, CounterRng& rng);

/// Draws a subset of D \ {player} for the player's k-th sampling unit.
using SubsetDraw = std::function<Coalition(std::size_t player, std::uint64_t unit, CounterRng& rng)>;

struct FeatureWisePlan {
  bool antithetic = false;
  bool adaptive = false;
  std::size_t pilot = 4;
};

/// Per-player marginal-contribution sampler shared by IME and feature-wise multilinear sampling.
EstimateTrace run_feature_wise(const CoalitionalGame& game, const Budget& budget, CounterRng& rng,
                               const FeatureWisePlan& plan, const SubsetDraw& draw, const char* name);

}  // namespace shapley::internal
