#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shapley/game.hpp"

namespace shapley {

/// s!(d-s-1)!/d!, the probability weight of one coalition of size s in the Shapley sum.
/// Computed in log space; valid for any d up to Coalition::kMaxPlayers and beyond.
/// Throws std::domain_error unless 0 <= s <= d-1.
double shapley_weight(std::size_t s, std::size_t d);

/// Shapley kernel (d-1) / (C(d,s) s (d-s)) for 1 <= s <= d-1. Sizes 0 and d carry infinite
/// weight and are rejected with std::domain_error.
double kernel_weight(std::size_t s, std::size_t d);

/// log C(n, k).
double log_binomial(std::size_t n, std::size_t k);

/// Exact Shapley values by full enumeration: every v(S) is evaluated exactly once (Gray-code
/// order) into a table, then marginal contributions are assembled from it. d <= 25.
AttributionVector brute_force_shapley(const CoalitionalGame& game);

/// Value table over all 2^d coalitions, indexed by bitmask, visiting coalitions in Gray-code
/// order so that each step toggles a single player. Throws BudgetError for d > 25.
std::vector<double> enumerate_game(const CoalitionalGame& game);

/// Exact Shapley values from a complete value table.
std::vector<double> shapley_from_table(const std::vector<double>& table, std::size_t d);

/// Splits the efficiency gap evenly across players. Requires finite v_empty / v_full.
AttributionVector additive_efficient_normalization(const AttributionVector& phi);

struct AxiomReport {
  bool efficiency = false;
  bool symmetry = false;
  bool dummy = false;
  double efficiency_gap = 0.0;
  /// Human-readable description of each violated check.
  std::vector<std::string> violations;

  bool all() const { return efficiency && symmetry && dummy; }
};

/// Checks efficiency, symmetry and dummy properties of `phi` against the game. Enumerates all
/// coalitions, so d <= 25.
AxiomReport check_axioms(const CoalitionalGame& game, const AttributionVector& phi, double tol);

}  // namespace shapley
