#include "locpen/bit_vector.hpp"

#include <bit>
#include <stdexcept>

#include "locpen/rng.hpp"

namespace locpen {

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string may only contain 0 and 1");
    }
  }
  return v;
}

std::size_t BitVector::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVector BitVector::operator^(const BitVector& other) const {
  if (other.size_ != size_) throw std::invalid_argument("BitVector size mismatch");
  BitVector out(size_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = words_[w] ^ other.words_[w];
  return out;
}

std::strong_ordering BitVector::operator<=>(const BitVector& other) const {
  if (auto c = size_ <=> other.size_; c != 0) return c;
  // Lexicographic in bit index order: the first differing bit decides.
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t diff = words_[w] ^ other.words_[w];
    if (diff == 0) continue;
    const int bit = std::countr_zero(diff);
    return ((words_[w] >> bit) & 1ULL) ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return std::strong_ordering::equal;
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

std::size_t BitVector::hash() const noexcept {
  std::uint64_t h = splitmix64(size_);
  for (auto w : words_) h = splitmix64(h ^ w);
  return static_cast<std::size_t>(h);
}

}  // namespace locpen
