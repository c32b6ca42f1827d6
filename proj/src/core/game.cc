#include "shapley/game.hpp"

#include <cmath>
#include <string>

#include "shapley/errors.hpp"

namespace shapley {

CoalitionalGame::CoalitionalGame(std::size_t num_players) : d_(num_players) {
  if (num_players == 0 || num_players > Coalition::kMaxPlayers) {
    throw BudgetError("game player count " + std::to_string(num_players) + " outside [1, " +
                      std::to_string(Coalition::kMaxPlayers) + "]");
  }
}

TabulatedGame::TabulatedGame(std::size_t num_players, std::vector<double> table)
    : CoalitionalGame(num_players), table_(std::move(table)) {
  if (num_players > kMaxPlayers) {
    throw BudgetError("tabulated game limited to " + std::to_string(kMaxPlayers) + " players");
  }
  if (table_.size() != (std::size_t{1} << num_players)) {
    throw std::invalid_argument("value table size must be 2^d");
  }
}

double AttributionVector::sum() const {
  // Neumaier summation keeps normalised vectors efficient to the last ulp or so.
  double s = 0.0;
  double c = 0.0;
  for (double x : phi) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace shapley
