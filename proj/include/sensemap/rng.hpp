#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "sensemap/common.hpp"

namespace sensemap {

// mt19937_64 with hand-rolled draws. std::uniform_*_distribution output is
// implementation-defined, which would break byte-identical artifacts across
// toolchains, so we map raw engine words ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0,1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("Rng::uniform: need lo < hi");
    return lo + (hi - lo) * uniform01();
  }

  // Uniform integer on [lo, hi], both inclusive. Rejection keeps it unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ConfigError("Rng::uniform_int: need lo <= hi");
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(gen_());  // full 64-bit range
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (kMax % span + 1) % span;  // 2^64 mod span
    for (;;) {
      const std::uint64_t x = gen_();
      if (rem == 0 || x <= kMax - rem)
        return lo + static_cast<std::int64_t>(x % span);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Stream derivation constants so subsystems never share a raw seed.
inline constexpr std::uint64_t kDisplacementStream = 0xD1B54A32D192ED03ull;
inline constexpr std::uint64_t kRetryStride = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kEnvStride = 0xBF58476D1CE4E5B9ull;

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ stream;
}

inline std::uint64_t retry_seed(std::uint64_t seed, std::uint64_t attempt) {
  return seed ^ (kRetryStride * attempt);
}

}  // namespace sensemap
