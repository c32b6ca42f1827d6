#pragma once

// Reference implementations used only by tests. They favour obviousness over speed and
// share no code with the library algorithms they check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "shapley/coalition.hpp"
#include "shapley/game.hpp"
#include "shapley/models.hpp"

namespace testing_support {

using shapley::Coalition;

/// Exact Shapley values by listing every subset of D \ {i} as a std::set and weighting it
/// with factorials computed by repeated multiplication.
std::vector<double> naive_shapley(std::size_t d, const std::function<double(const std::set<std::size_t>&)>& v);

/// naive_shapley over a library game (coalitions built member by member).
std::vector<double> naive_shapley(const shapley::CoalitionalGame& game);

double factorial(std::size_t n);

/// Game with independent N(0, 1) values on every coalition.
std::unique_ptr<shapley::TabulatedGame> random_game(std::size_t d, std::uint64_t seed);

/// v(S) = sum_{i in S} c_i.
std::unique_ptr<shapley::FunctionGame> additive_game(const std::vector<double>& c);

/// Random binary tree with depth <= max_depth over features [0, d). Features may repeat
/// along a path. Leaf covers are random positive integers; internal covers are the sums.
shapley::Tree random_tree(std::mt19937_64& rng, std::size_t d, std::size_t max_depth);

shapley::TreeEnsemble random_ensemble(std::mt19937_64& rng, std::size_t d, std::size_t n_trees,
                                      std::size_t max_depth);

shapley::LinearModel random_linear(std::mt19937_64& rng, std::size_t d);

std::vector<double> random_point(std::mt19937_64& rng, std::size_t d);

/// Value of the cover-weighted traversal game, written as an explicit expectation over leaves:
/// sum over leaves of value * prod over absent-feature edges of (child cover / sum of sibling covers),
/// restricted to leaves consistent with x_e on present features.
double traversal_game(const shapley::TreeEnsemble& model, const std::vector<double>& x_e,
                      const std::set<std::size_t>& present);

/// g_i(q) = E[v(G + i) - v(G)], G includes each other player with probability q, by full
/// enumeration of a value table.
double multilinear_g(const std::vector<double>& table, std::size_t d, std::size_t i, double q);

/// Sample mean / standard deviation helpers.
double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);

}  // namespace testing_support
