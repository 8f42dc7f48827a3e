#pragma once

#include <cstdint>

namespace locpen {

// Every random quantity in the library is a pure function of a seed and an
// index path, built from the SplitMix64 finalizer. Parallel workers can then
// evaluate replicates or Monte Carlo draws in any order and still reproduce
// the sequential result bit for bit.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for child stream `index` of `seed`:
///   derive_seed(s, i) = splitmix64(splitmix64(s) ^ splitmix64(i + 0x632be59bd9b4e019)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Named child streams so unrelated consumers of one seed never collide.
enum class Stream : std::uint64_t {
  kSample = 0x5a4d,
  kSigns = 0x516e,
  kExpectationBatch = 0xe8a7,
  kStatisticBatch = 0x57a7,
  kShatterBatch = 0x54a7,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

/// Sequential counter-based generator for tests and tools.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next() noexcept { return derive_seed(seed_, counter_++); }
  double uniform() noexcept { return to_unit(next()); }
  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace locpen
