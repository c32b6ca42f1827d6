#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shapley/bench/config.hpp"
#include "shapley/bench/dataset.hpp"
#include "shapley/game.hpp"
#include "shapley/models.hpp"
#include "shapley/removal.hpp"

namespace shapley::bench {

/// Games up to this many players are tabulated once before the trials run.
inline constexpr std::size_t kTabulateMaxPlayers = 16;

/// Everything an experiment derives from its config before running estimators.
struct Problem {
  Dataset data;
  Model model;
  std::vector<double> x_e;
  std::unique_ptr<BaselineSet> baselines;
  std::unique_ptr<CoalitionalGame> game;
  AttributionVector truth;
  std::string truth_method;
};

/// Loads or generates the dataset, appends dummies, trains or loads the model, builds the
/// game and computes the reference attributions.
Problem prepare_problem(const ExperimentConfig& cfg);

/// Model from the config's model spec, trained on `data` when needed.
Model build_model(const ExperimentConfig& cfg, const Dataset& data);

/// Game for the configured removal strategy, without tabulation.
std::unique_ptr<CoalitionalGame> build_game(const ExperimentConfig& cfg, const Model& model, const Dataset& data,
                                            std::span<const double> x_e, const BaselineSet& baselines);

/// One estimate at budget `budget`, or nullopt when the budget is below the estimator's
/// minimum or the checkpoint produced no estimate. Exact methods ignore the budget and seed.
std::optional<AttributionVector> run_estimator(const EstimatorSpec& spec, const Problem& problem,
                                               std::uint64_t budget, std::uint64_t seed);

struct ErrorDecomposition {
  double mse = 0.0;
  double bias_sq = 0.0;
  double variance = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_missing = 0;
};

/// Squared error of the trial estimates against `truth` over the first `n_features`
/// features: bias_sq and variance are feature means of the per-feature squared bias and
/// population variance across trials, mse = bias_sq + variance up to rounding. NaN
/// entries when no trial produced an estimate.
ErrorDecomposition decompose(const std::vector<std::optional<std::vector<double>>>& trials,
                             const std::vector<double>& truth, std::size_t n_features);

struct Cell {
  std::size_t estimator = 0;
  std::uint64_t budget = 0;
  std::vector<std::optional<std::vector<double>>> trials;
  ErrorDecomposition error;
};

struct Report {
  ExperimentConfig config;
  std::vector<std::string> feature_names;
  AttributionVector truth;
  std::string truth_method;
  std::vector<Cell> cells;
};

/// Seed of one trial, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, std::size_t estimator, std::uint64_t budget, std::size_t trial);

/// Runs every (estimator, budget, trial) combination on up to `jobs` threads. The result
/// does not depend on `jobs`.
Report run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

/// Writes summary.csv, trials.csv, truth.csv and config.json into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

struct DegradationRow {
  std::string estimator;
  std::string variant;
  std::uint64_t budget = 0;
  double mse_base = 0.0;
  double mse_dummies = 0.0;
  double ratio = 0.0;
};

struct StressResult {
  Report base;
  Report stressed;
  /// MSE ratios over the original features.
  std::vector<DegradationRow> degradation;
};

/// Runs the config as given and again with `n_dummies` zero columns appended (model retrained).
StressResult dummy_feature_stress(const ExperimentConfig& cfg, std::size_t n_dummies, std::size_t jobs = 1);

/// Writes base/ and dummies/ report directories plus degradation.csv into `dir`.
void write_stress(const StressResult& result, const std::filesystem::path& dir);

/// "# config_hash=... seed=..." and "# config=..." lines prefixed to every CSV.
std::string preamble(const ExperimentConfig& cfg);

}  // namespace shapley::bench
