#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "shapley/coalition.hpp"

namespace shapley {

/// A coalitional game v: 2^D -> R. `evaluate` is the only entry point estimators use; it
/// counts every call. Implementations override `value`, which must be a pure function of
/// the coalition and safe to call concurrently.
class CoalitionalGame {
 public:
  explicit CoalitionalGame(std::size_t num_players);
  virtual ~CoalitionalGame() = default;

  CoalitionalGame(const CoalitionalGame&) = delete;
  CoalitionalGame& operator=(const CoalitionalGame&) = delete;

  std::size_t num_players() const { return d_; }

  double evaluate(const Coalition& s) const {
    eval_count_.fetch_add(1, std::memory_order_relaxed);
    return value(s);
  }

  std::uint64_t eval_count() const { return eval_count_.load(std::memory_order_relaxed); }

 protected:
  virtual double value(const Coalition& s) const = 0;

 private:
  std::size_t d_;
  mutable std::atomic<std::uint64_t> eval_count_{0};
};

/// Game backed by an arbitrary callable.
class FunctionGame final : public CoalitionalGame {
 public:
  using Fn = std::function<double(const Coalition&)>;
  FunctionGame(std::size_t num_players, Fn fn) : CoalitionalGame(num_players), fn_(std::move(fn)) {}

 protected:
  double value(const Coalition& s) const override { return fn_(s); }

 private:
  Fn fn_;
};

/// Full value table over all 2^d coalitions, indexed by bitmask. Building from another game
/// calls the source's `evaluate` 2^d times; lookups afterwards are O(1). d <= 25.
class TabulatedGame final : public CoalitionalGame {
 public:
  static constexpr std::size_t kMaxPlayers = 25;

  TabulatedGame(std::size_t num_players, std::vector<double> table);
  static std::unique_ptr<TabulatedGame> from(const CoalitionalGame& source);

  double at(std::uint64_t mask) const { return table_[mask]; }
  const std::vector<double>& table() const { return table_; }

 protected:
  double value(const Coalition& s) const override { return table_[s.low_word()]; }

 private:
  std::vector<double> table_;
};

/// Per-player credits plus the game endpoints they should reconcile with.
struct AttributionVector {
  std::vector<double> phi;
  double v_empty = std::numeric_limits<double>::quiet_NaN();
  double v_full = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t evals_used = 0;

  std::size_t size() const { return phi.size(); }
  double sum() const;
  /// v_full - v_empty - sum(phi). NaN when endpoints are unknown.
  double efficiency_gap() const { return v_full - v_empty - sum(); }
};

}  // namespace shapley
