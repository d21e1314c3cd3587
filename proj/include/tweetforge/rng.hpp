#pragma once

#include <cstdint>
#include <initializer_list>

namespace tweetforge {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based generator: output i is a pure function of (key, i), so any
/// worker can reproduce any stream without shared state.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  // Stream key derived from several words, e.g. (seed, block index, epoch).
  static constexpr CounterRng keyed(std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t k = 0x6A09E667F3BCC909ull;
    for (auto w : words) k = mix64(k ^ mix64(w));
    return CounterRng(k);
  }

  constexpr std::uint64_t next() noexcept { return mix64(key_ ^ mix64(++counter_)); }

  // Uniform in [0, n) (Lemire's multiply-shift with rejection); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return next(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tweetforge
