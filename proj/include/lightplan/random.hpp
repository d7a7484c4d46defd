#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace lightplan {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable hash of a seed and a tuple of counters; the key of a counter-based
/// random stream.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t c : counters) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform in (0, 1) from the `draw`-th value of stream `key`.
inline double uniform_open01(std::uint64_t key, std::uint64_t draw) {
  const std::uint64_t bits = mix64(key + mix64(draw)) >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on draws 0 and 1 of stream `key`. Pure
/// arithmetic, so identical on every platform and thread schedule.
inline double standard_normal(std::uint64_t key) {
  const double u1 = uniform_open01(key, 0);
  const double u2 = uniform_open01(key, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace lightplan
