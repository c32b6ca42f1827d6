#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shapley/bench/dataset.hpp"
#include "shapley/trainer.hpp"

namespace shapley::bench {

// Experiment configuration, read from and written to JSON. Every key is optional; missing
// keys take the defaults below. Unknown keys are rejected.
//
// {
//   "dataset":   {"path": "", "target": "",
//                 "synthetic": {"n_rows": 500, "d": 10, "rho": 0.5, "noise": 0.1, "seed": 7}},
//   "model":     {"kind": "boosted_trees" | "linear" | "file", "path": "",
//                 "n_trees": 100, "max_depth": 4, "learning_rate": 0.1, "min_samples": 5,
//                 "subsample": 1.0, "seed": 0},
//   "removal":   {"strategy": "baseline" | "marginal" | "uniform" | "product_marginals" |
//                             "conditional_gaussian",
//                 "baseline_rows": [1], "n_draws": 256},
//   "explicand_row": 0,
//   "estimators": [{"name": "kernel_shap", "paired": true}, ...],  (default_estimators())
//   "budgets":   [500, 1000, 5000, 10000, 50000, 100000],
//   "n_trials":  100,
//   "seed":      0,
//   "dummies":   0
// }
//
// An empty dataset path selects the synthetic generator. The conditional_gaussian strategy
// fits a Gaussian to the dataset's features.

struct EstimatorSpec {
  /// semivalue, appro_shapley, ime, kernel_shap, sgd_shapley, multilinear, linear_shap,
  /// interventional_tree_shap, path_dependent_tree_shap, brute_force.
  std::string name;
  bool antithetic = false;
  bool adaptive = false;
  bool paired = false;
  bool feature_wise = false;
  /// Apply additive efficient normalization to every estimate.
  bool normalize = false;
  /// "trapezoid" or "random".
  std::string sampling = "trapezoid";
  std::size_t q_nodes = 50;
  std::size_t pilot = 4;
  double sgd_c = 1.0;
  double sgd_t0 = 10.0;

  /// Short label of the flags in effect, "plain" when none.
  std::string variant() const;
  bool is_exact() const;
  bool operator==(const EstimatorSpec&) const = default;
};

/// appro_shapley (plain, antithetic), ime (adaptive), kernel_shap (plain, paired),
/// sgd_shapley, multilinear (trapezoid, random q) and the exact reference.
std::vector<EstimatorSpec> default_estimators();

struct ModelSpec {
  std::string kind = "boosted_trees";
  std::string path;
  BoostingConfig boosting;
  bool operator==(const ModelSpec&) const = default;
};

struct ExperimentConfig {
  std::string dataset_path;
  std::string target;
  SyntheticSpec synthetic;
  ModelSpec model;
  std::string strategy = "baseline";
  /// Rows of the dataset used as baselines; empty means every row except the explicand.
  std::vector<std::size_t> baseline_rows = {1};
  /// Monte Carlo draws per coalition for the sampled removal strategies.
  std::size_t n_draws = 256;
  std::size_t explicand_row = 0;
  std::vector<EstimatorSpec> estimators = default_estimators();
  std::vector<std::uint64_t> budgets = {500, 1000, 5000, 10000, 50000, 100000};
  std::size_t n_trials = 100;
  std::uint64_t seed = 0;
  std::size_t dummies = 0;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Canonical JSON text (sorted keys, compact).
std::string config_to_json(const ExperimentConfig& cfg);
/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

std::vector<std::uint64_t> parse_budget_list(const std::string& csv);

}  // namespace shapley::bench
