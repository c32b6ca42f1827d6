#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace shapley {

/// A subset of players {0, ..., d-1}. Storage is a fixed 512-bit word array, so copies are
/// cheap and never allocate; player counts above kMaxPlayers are rejected at construction.
class Coalition {
 public:
  static constexpr std::size_t kMaxPlayers = 512;
  static constexpr std::size_t kWords = kMaxPlayers / 64;

  /// Empty coalition over d players. Throws BudgetError when d is 0 or exceeds kMaxPlayers.
  explicit Coalition(std::size_t d);

  static Coalition empty(std::size_t d) { return Coalition(d); }
  static Coalition full(std::size_t d);
  static Coalition of(std::size_t d, std::initializer_list<std::size_t> members);
  static Coalition of(std::size_t d, std::span<const std::size_t> members);
  /// Low bits of `mask` become members; requires d <= 64.
  static Coalition from_mask(std::size_t d, std::uint64_t mask);

  std::size_t num_players() const { return d_; }

  bool contains(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void insert(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void erase(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  void toggle(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

  Coalition with(std::size_t i) const {
    Coalition c = *this;
    c.insert(i);
    return c;
  }
  Coalition without(std::size_t i) const {
    Coalition c = *this;
    c.erase(i);
    return c;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool is_empty() const { return size() == 0; }

  Coalition complement() const;
  Coalition operator|(const Coalition& other) const;
  Coalition operator&(const Coalition& other) const;
  Coalition operator-(const Coalition& other) const;

  bool operator==(const Coalition& other) const { return d_ == other.d_ && words_ == other.words_; }

  /// Members in increasing order.
  std::vector<std::size_t> members() const;

  /// First storage word; equals the bitmask of the coalition when d <= 64.
  std::uint64_t low_word() const { return words_[0]; }
  std::span<const std::uint64_t, kWords> words() const { return words_; }

  std::uint64_t hash() const;

  /// "{0,3,5}" style rendering for diagnostics.
  std::string to_string() const;

 private:
  std::array<std::uint64_t, kWords> words_{};
  std::size_t d_;
};

}  // namespace shapley

template <>
struct std::hash<shapley::Coalition> {
  std::size_t operator()(const shapley::Coalition& c) const noexcept { return c.hash(); }
};
