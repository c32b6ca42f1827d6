#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapley/game.hpp"

namespace shapley {

/// Evaluation budget of a stochastic estimator, in calls to CoalitionalGame::evaluate.
///
/// Snapshots are offered at unit boundaries (a permutation walk, a marginal-contribution
/// pair, a regression row). A checkpoint crossed before every player has an estimate is
/// recorded as missing. Checkpoints the run never reaches, because the remaining budget is
/// smaller than one unit, receive the final estimate. An empty checkpoint list means
/// {max_evals}.
struct Budget {
  std::uint64_t max_evals = 0;
  std::vector<std::uint64_t> checkpoints;

  static Budget single(std::uint64_t evals) { return Budget{evals, {evals}}; }
  /// Throws ConfigError unless checkpoints are strictly increasing and <= max_evals.
  void validate() const;
  std::vector<std::uint64_t> effective_checkpoints() const;
};

struct Snapshot {
  std::uint64_t checkpoint = 0;
  AttributionVector estimate;
  /// Per-player sample variance of the averaged sampling units (NaN when undefined).
  std::vector<double> variance;
  /// Per-player number of sampling units behind the estimate.
  std::vector<std::uint64_t> counts;

  /// sqrt(variance / count) per player.
  std::vector<double> standard_errors() const;
};

struct EstimateTrace {
  std::vector<Snapshot> snapshots;
  std::uint64_t evals_used = 0;
  std::vector<std::string> warnings;

  bool empty() const { return snapshots.empty(); }
  const Snapshot& last() const { return snapshots.back(); }
  /// Snapshot recorded for `checkpoint`, or nullptr when it is missing.
  const Snapshot* at(std::uint64_t checkpoint) const;
};

/// Marginal contributions of player i over coalitions S drawn from the Shapley weights P(S),
/// realised as the predecessors of i in a uniform random permutation. Two evaluations per
/// contribution. Only phi[i] is estimated; game endpoints are not evaluated (NaN).
EstimateTrace sample_semivalue(const CoalitionalGame& game, std::size_t player, const Budget& budget,
                               std::uint64_t seed);

/// Permutation walks: each walk evaluates the d+1 prefixes of a random ordering and yields
/// one marginal contribution per player. Antithetic mode pairs each ordering with its
/// reverse. Every snapshot is efficient. Throws BudgetError when max_evals is below one unit.
EstimateTrace appro_shapley(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                            bool antithetic = false);

struct ImeOptions {
  bool antithetic = false;
  bool adaptive = false;
  /// Pilot contributions per player before adaptive allocation.
  std::size_t pilot = 4;
};

/// Per-player random-order sampling. Spends 2 evaluations on v(empty), v(D), then draws
/// marginal contributions player by player. Antithetic mode pairs S with (D \ {i}) \ S.
/// Adaptive mode allocates post-pilot units proportionally to each player's pilot standard
/// deviation.
EstimateTrace ime(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                  const ImeOptions& options = {});

/// Largest-remainder apportionment of `total` units proportional to `weights`. All-zero
/// weights are treated as equal. Ties go to the lower index.
std::vector<std::uint64_t> allocate_proportional(const std::vector<double>& weights, std::uint64_t total);

/// Probability of drawing coalition size s (1..d-1) under the normalised Shapley kernel;
/// index 0 and d hold zero.
std::vector<double> kernel_size_distribution(std::size_t d);

struct WlsSolution {
  std::vector<double> beta;
  bool rank_deficient = false;
};

/// Weighted least squares over additive games u(S) = beta0 + sum_{i in S} beta_i with
/// beta0 = v(empty) and beta0 + sum(beta) = v(D) enforced by eliminating the last player.
/// Rows are interior coalitions only.
class WlsSystem {
 public:
  WlsSystem(std::size_t d, double v_empty, double v_full);

  /// Adds one row; `unit` groups rows sampled together (e.g. a coalition and its complement)
  /// for variance estimation. Throws std::invalid_argument for |S| in {0, d}.
  void add(const Coalition& s, double weight, double value, std::uint64_t unit);

  std::size_t rows() const { return coalitions_.size(); }
  std::size_t num_players() const { return d_; }

  /// Least-norm solution when the reduced system is rank deficient.
  WlsSolution solve() const;

  /// Per-player variance of the linearised per-unit influence on the solution, and the
  /// number of units.
  std::pair<std::vector<double>, std::uint64_t> unit_variance(const WlsSolution& solution) const;

 private:
  std::size_t d_;
  double v_empty_;
  double v_full_;
  std::vector<double> normal_;  // (d-1)^2, row-major
  std::vector<double> rhs_;     // d-1
  std::vector<Coalition> coalitions_;
  std::vector<double> weights_;
  std::vector<double> values_;
  std::vector<std::uint64_t> units_;
};

/// KernelSHAP: coalition sizes drawn from the normalised kernel over 1..d-1, coalitions
/// uniform within a size, the constrained regression solved at each snapshot. Paired mode
/// adds the complement of every sampled coalition. Needs max_evals >= d + 2.
EstimateTrace kernel_shap(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                          bool paired = false);

struct SgdOptions {
  /// Step size c / (t + t0) at step t.
  double c = 1.0;
  double t0 = 10.0;
};

/// Projected SGD on the kernel-weighted regression objective, one step per sampled
/// coalition, projected onto sum(beta) = v(D) - v(empty) after each step. Starts from the
/// projection of the origin. Reports no variance (NaN).
EstimateTrace sgd_shapley(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                          const SgdOptions& options = {});

enum class QSampling {
  /// Fixed grid: q_nodes interior points plus both endpoints, two coalitions per interior
  /// point and one per endpoint per cycle, so a complete cycle averages to the trapezoid rule.
  kTrapezoid,
  /// q ~ U(0, 1) per coalition (unbiased).
  kRandom,
};

struct MultilinearOptions {
  QSampling sampling = QSampling::kTrapezoid;
  bool feature_wise = false;
  bool antithetic = false;
  bool adaptive = false;
  std::size_t q_nodes = 50;
  std::size_t pilot = 4;
};

/// Multilinear-extension sampling of phi_i = int_0^1 E[v(G_i + i) - v(G_i)] dq with G_i
/// including each other player independently with probability q. Joint mode reuses one
/// coalition for every player (d+1 evaluations per coalition); feature-wise mode samples each
/// player separately and supports adaptive allocation. Antithetic mode also uses the
/// complementary coalition. Spends 2 evaluations on the endpoints first.
EstimateTrace multilinear(const CoalitionalGame& game, const Budget& budget, std::uint64_t seed,
                          const MultilinearOptions& options = {});

/// The q sequence a trapezoid cycle walks through, in visiting order.
std::vector<double> trapezoid_cycle(std::size_t q_nodes);

/// Index of the first snapshot at which max_i stderr_i < threshold. Snapshots whose players
/// have fewer than two units (or no variance estimate) are never eligible.
std::optional<std::size_t> detect_convergence(const EstimateTrace& trace, double threshold);

}  // namespace shapley
