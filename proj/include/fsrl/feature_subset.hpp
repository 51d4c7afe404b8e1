#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsrl/rng.hpp"

namespace fsrl {

// A subset of feature indices over a fixed dimensionality d (d <= 512).
// This is the search state: equality and hashing depend only on the raised
// bits, never on insertion order, and the cardinality is cached.
class FeatureSubset {
 public:
  static constexpr std::size_t kMaxFeatures = 512;
  static constexpr std::size_t kWords = kMaxFeatures / 64;

  FeatureSubset() = default;

  explicit FeatureSubset(std::size_t dimension) : dim_(static_cast<std::uint16_t>(dimension)) {
    if (dimension > kMaxFeatures) {
      throw std::invalid_argument("FeatureSubset: dimension exceeds " +
                                  std::to_string(kMaxFeatures));
    }
  }

  static FeatureSubset full(std::size_t dimension) {
    FeatureSubset s(dimension);
    for (std::size_t f = 0; f < dimension; ++f) s.add(f);
    return s;
  }

  static FeatureSubset of(std::size_t dimension, std::initializer_list<std::size_t> features) {
    FeatureSubset s(dimension);
    for (std::size_t f : features) s.add(f);
    return s;
  }

  std::size_t dimension() const { return dim_; }
  std::size_t cardinality() const { return card_; }
  bool is_full() const { return card_ == dim_; }

  bool contains(std::size_t f) const {
    if (f >= dim_) return false;
    return (words_[f / 64] >> (f % 64)) & 1ULL;
  }

  void add(std::size_t f) {
    check_index(f);
    std::uint64_t& w = words_[f / 64];
    const std::uint64_t bit = 1ULL << (f % 64);
    if (!(w & bit)) {
      w |= bit;
      ++card_;
    }
  }

  FeatureSubset with(std::size_t f) const {
    FeatureSubset s = *this;
    s.add(f);
    return s;
  }

  // Raised feature indices, ascending.
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(card_);
    for (std::size_t f = 0; f < dim_; ++f) {
      if (contains(f)) out.push_back(f);
    }
    return out;
  }

  // Features not yet included, ascending. These are the legal actions.
  std::vector<std::size_t> available() const {
    std::vector<std::size_t> out;
    out.reserve(dim_ - card_);
    for (std::size_t f = 0; f < dim_; ++f) {
      if (!contains(f)) out.push_back(f);
    }
    return out;
  }

  bool is_subset_of(const FeatureSubset& other) const {
    for (std::size_t w = 0; w < kWords; ++w) {
      if (words_[w] & ~other.words_[w]) return false;
    }
    return true;
  }

  // Bitmask as fixed-width hex, most significant digit first; width covers
  // the subset's dimension so keys of one dataset align column-wise.
  std::string to_hex() const {
    const std::size_t digits = dim_ == 0 ? 1 : (dim_ + 3) / 4;
    std::string out(digits, '0');
    static const char* kHex = "0123456789abcdef";
    for (std::size_t i = 0; i < digits; ++i) {
      const std::size_t nibble = digits - 1 - i;
      const unsigned v = (words_[nibble / 16] >> ((nibble % 16) * 4)) & 0xF;
      out[i] = kHex[v];
    }
    return out;
  }

  bool operator==(const FeatureSubset& other) const { return words_ == other.words_; }

  std::size_t hash() const {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (std::uint64_t w : words_) h = splitmix64(h ^ w);
    return static_cast<std::size_t>(h);
  }

  // Numeric order of the bitmask (high word first). Used as the final
  // deterministic tie-break when comparing equally good subsets.
  static int compare_bits(const FeatureSubset& a, const FeatureSubset& b) {
    for (std::size_t w = kWords; w-- > 0;) {
      if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w] ? -1 : 1;
    }
    return 0;
  }

 private:
  void check_index(std::size_t f) const {
    if (f >= dim_) {
      throw std::out_of_range("FeatureSubset: feature index " + std::to_string(f) +
                              " out of range for dimension " + std::to_string(dim_));
    }
  }

  std::array<std::uint64_t, kWords> words_{};
  std::uint16_t dim_ = 0;
  std::uint16_t card_ = 0;
};

struct FeatureSubsetHash {
  std::size_t operator()(const FeatureSubset& s) const { return s.hash(); }
};

}  // namespace fsrl
