#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ltfei {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Hashes a path of indices (e.g. master seed, trial, coordinate) into a stream key.
inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t k = splitmix64(seed ^ 0x6A09E667F3BCC908ULL);
  for (std::uint64_t p : path) k = splitmix64(k ^ splitmix64(p + 0xBB67AE8584CAA73BULL));
  return k;
}

/// Counter-based random stream: output j is a keyed hash of (key, j), so any
/// stream can be recreated from its key alone, independent of scheduling.
/// Satisfies UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return splitmix64(key_ ^ splitmix64(counter_++)); }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

  /// Independent child stream, e.g. one per sample block.
  [[nodiscard]] constexpr CounterStream child(std::uint64_t index) const noexcept {
    return CounterStream(derive_key(key_, {index}));
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform double in [0, 1) from 53 random bits.
inline double uniform01(CounterStream& s) noexcept {
  return static_cast<double>(s() >> 11) * 0x1.0p-53;
}

}  // namespace ltfei
