#ifndef COSMA_BITSET_HPP
#define COSMA_BITSET_HPP

#include <cstdint>
#include <cstddef>
#include <vector>

namespace cosma {

// Fixed-size dynamic bitset used for state sets and fairness membership.
class DynBitset {
public:
  DynBitset() = default;
  explicit DynBitset(std::size_t n, bool value = false)
      : size_(n), words_((n + 63) / 64, value ? ~0ull : 0ull) {
    trim();
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }
  void set_all() {
    for (auto& w : words_) w = ~0ull;
    trim();
  }
  void reset_all() {
    for (auto& w : words_) w = 0;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }
  bool all() const {
    DynBitset full(size_, true);
    return *this == full;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  DynBitset& operator|=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  DynBitset operator~() const {
    DynBitset r(*this);
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }
  friend DynBitset operator|(DynBitset a, const DynBitset& b) { return a |= b; }
  friend DynBitset operator&(DynBitset a, const DynBitset& b) { return a &= b; }

  bool operator==(const DynBitset& o) const = default;

  // true iff every set bit of `o` is also set here
  bool contains(const DynBitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if ((o.words_[i] & ~words_[i]) != 0) return false;
    return true;
  }

private:
  void trim() {
    if (size_ & 63) words_.back() &= (1ull << (size_ & 63)) - 1;
  }
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

} // namespace cosma

#endif
