#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace locpen {

/// Fixed-length binary vector, packed 64 bits per word. Bits past size() are
/// always zero so word-wise comparison and hashing are canonical.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  /// Parses "0110" (index 0 first).
  static BitVector from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1ULL; }
  void set(std::size_t i, bool value = true) noexcept {
    const std::uint64_t mask = 1ULL << (i % 64);
    if (value) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }
  std::size_t count() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  BitVector operator^(const BitVector& other) const;
  bool operator==(const BitVector&) const = default;
  std::strong_ordering operator<=>(const BitVector& other) const;

  std::string to_string() const;
  std::size_t hash() const noexcept;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitVectorHash {
  std::size_t operator()(const BitVector& v) const noexcept { return v.hash(); }
};

}  // namespace locpen
