#include "shapley/game_core.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "shapley/errors.hpp"

namespace shapley {

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) throw std::domain_error("log_binomial: k > n");
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double shapley_weight(std::size_t s, std::size_t d) {
  if (d == 0 || s >= d) {
    throw std::domain_error("shapley_weight: need 0 <= s <= d-1, got s=" + std::to_string(s) +
                            " d=" + std::to_string(d));
  }
  // s!(d-s-1)!/d! = 1 / (d * C(d-1, s))
  return std::exp(-std::log(static_cast<double>(d)) - log_binomial(d - 1, s));
}

double kernel_weight(std::size_t s, std::size_t d) {
  if (s == 0 || s >= d) {
    throw std::domain_error("kernel_weight: coalition size " + std::to_string(s) +
                            " excluded (infinite weight) for d=" + std::to_string(d));
  }
  const double log_w = std::log(static_cast<double>(d - 1)) - log_binomial(d, s) -
                       std::log(static_cast<double>(s)) - std::log(static_cast<double>(d - s));
  return std::exp(log_w);
}

std::vector<double> enumerate_game(const CoalitionalGame& game) {
  const std::size_t d = game.num_players();
  if (d > TabulatedGame::kMaxPlayers) {
    throw BudgetError("exhaustive enumeration limited to d <= 25, got d=" + std::to_string(d));
  }
  const std::uint64_t n = std::uint64_t{1} << d;
  std::vector<double> table(n);
  Coalition s(d);
  table[0] = game.evaluate(s);
  for (std::uint64_t k = 1; k < n; ++k) {
    s.toggle(static_cast<std::size_t>(std::countr_zero(k)));
    table[k ^ (k >> 1)] = game.evaluate(s);
  }
  return table;
}

std::vector<double> shapley_from_table(const std::vector<double>& table, std::size_t d) {
  std::vector<double> weight(d);
  for (std::size_t s = 0; s < d; ++s) weight[s] = shapley_weight(s, d);
  std::vector<double> phi(d, 0.0);
  const std::uint64_t n = std::uint64_t{1} << d;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    const double w = weight[std::min<std::size_t>(static_cast<std::size_t>(std::popcount(mask)), d - 1)];
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (mask & bit) continue;
      phi[i] += w * (table[mask | bit] - table[mask]);
    }
  }
  return phi;
}

std::unique_ptr<TabulatedGame> TabulatedGame::from(const CoalitionalGame& source) {
  return std::make_unique<TabulatedGame>(source.num_players(), enumerate_game(source));
}

AttributionVector brute_force_shapley(const CoalitionalGame& game) {
  const std::size_t d = game.num_players();
  const std::uint64_t before = game.eval_count();
  std::vector<double> table = enumerate_game(game);
  AttributionVector out;
  out.phi = shapley_from_table(table, d);
  out.v_empty = table.front();
  out.v_full = table.back();
  out.evals_used = game.eval_count() - before;
  return out;
}

AttributionVector additive_efficient_normalization(const AttributionVector& phi) {
  AttributionVector out = phi;
  if (phi.phi.empty()) return out;
  const double gap = phi.efficiency_gap();
  if (!std::isfinite(gap)) {
    throw std::invalid_argument("additive_efficient_normalization: non-finite efficiency gap");
  }
  const double share = gap / static_cast<double>(phi.phi.size());
  for (double& x : out.phi) x += share;
  return out;
}

AxiomReport check_axioms(const CoalitionalGame& game, const AttributionVector& phi, double tol) {
  const std::size_t d = game.num_players();
  if (phi.size() != d) throw std::invalid_argument("check_axioms: attribution length != d");
  const std::vector<double> table = enumerate_game(game);
  const std::uint64_t n = std::uint64_t{1} << d;

  AxiomReport report;
  report.efficiency_gap = table.back() - table.front() - phi.sum();
  report.efficiency = std::abs(report.efficiency_gap) <= tol;
  if (!report.efficiency) {
    std::ostringstream os;
    os << "efficiency: gap " << report.efficiency_gap;
    report.violations.push_back(os.str());
  }

  report.dummy = true;
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    bool is_dummy = true;
    for (std::uint64_t mask = 0; mask < n && is_dummy; ++mask) {
      if (!(mask & bit)) is_dummy = std::abs(table[mask | bit] - table[mask]) <= tol;
    }
    if (is_dummy && std::abs(phi.phi[i]) > tol) {
      report.dummy = false;
      std::ostringstream os;
      os << "dummy: player " << i << " has phi " << phi.phi[i];
      report.violations.push_back(os.str());
    }
  }

  report.symmetry = true;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const std::uint64_t bi = std::uint64_t{1} << i;
      const std::uint64_t bj = std::uint64_t{1} << j;
      bool symmetric = true;
      for (std::uint64_t mask = 0; mask < n && symmetric; ++mask) {
        if (mask & (bi | bj)) continue;
        symmetric = std::abs(table[mask | bi] - table[mask | bj]) <= tol;
      }
      if (symmetric && std::abs(phi.phi[i] - phi.phi[j]) > tol) {
        report.symmetry = false;
        std::ostringstream os;
        os << "symmetry: players " << i << " and " << j << " differ by " << phi.phi[i] - phi.phi[j];
        report.violations.push_back(os.str());
      }
    }
  }
  return report;
}

}  // namespace shapley
