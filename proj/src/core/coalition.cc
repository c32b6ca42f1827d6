#include "shapley/coalition.hpp"

#include <sstream>

#include "shapley/errors.hpp"
#include "shapley/random.hpp"

namespace shapley {

Coalition::Coalition(std::size_t d) : d_(d) {
  if (d == 0 || d > kMaxPlayers) {
    throw BudgetError("coalition player count " + std::to_string(d) + " outside [1, " +
                      std::to_string(kMaxPlayers) + "]");
  }
}

Coalition Coalition::full(std::size_t d) { return Coalition(d).complement(); }

Coalition Coalition::of(std::size_t d, std::initializer_list<std::size_t> members) {
  return of(d, std::span<const std::size_t>(members.begin(), members.size()));
}

Coalition Coalition::of(std::size_t d, std::span<const std::size_t> members) {
  Coalition c(d);
  for (std::size_t i : members) {
    if (i >= d) throw std::out_of_range("player index " + std::to_string(i) + " >= d");
    c.insert(i);
  }
  return c;
}

Coalition Coalition::from_mask(std::size_t d, std::uint64_t mask) {
  if (d > 64) throw std::invalid_argument("from_mask requires d <= 64");
  Coalition c(d);
  c.words_[0] = d == 64 ? mask : (mask & ((1ULL << d) - 1));
  return c;
}

Coalition Coalition::complement() const {
  Coalition c(d_);
  const std::size_t full_words = d_ / 64;
  for (std::size_t w = 0; w < full_words; ++w) c.words_[w] = ~words_[w];
  if (const std::size_t rem = d_ % 64; rem != 0) {
    c.words_[full_words] = ~words_[full_words] & ((1ULL << rem) - 1);
  }
  return c;
}

Coalition Coalition::operator|(const Coalition& other) const {
  Coalition c = *this;
  for (std::size_t w = 0; w < kWords; ++w) c.words_[w] |= other.words_[w];
  return c;
}

Coalition Coalition::operator&(const Coalition& other) const {
  Coalition c = *this;
  for (std::size_t w = 0; w < kWords; ++w) c.words_[w] &= other.words_[w];
  return c;
}

Coalition Coalition::operator-(const Coalition& other) const {
  Coalition c = *this;
  for (std::size_t w = 0; w < kWords; ++w) c.words_[w] &= ~other.words_[w];
  return c;
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < kWords; ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t Coalition::hash() const { return mix_key(d_, words_); }

std::string Coalition::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t i : members()) {
    if (!first) os << ',';
    os << i;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace shapley
