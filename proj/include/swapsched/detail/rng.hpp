#pragma once

#include <cmath>
#include <cstdint>

namespace swapsched::detail {

// SplitMix64 finalizer. All randomness in the library is derived by hashing
// (seed, stream, index...) tuples through this mixer, so every draw is
// addressable and independent of evaluation order.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

inline std::uint64_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return hash2(hash2(a, b), c);
}

inline std::uint64_t hash4(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d) {
  return hash2(hash3(a, b, c), d);
}

// Uniform in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform in [-1, 1).
inline double to_symmetric(std::uint64_t bits) {
  return 2.0 * to_unit(bits) - 1.0;
}

// One standard normal draw via Box-Muller on two derived uniforms.
// std::normal_distribution is implementation-defined, which would break
// cross-platform reproducibility of seeded runs.
inline double to_normal(std::uint64_t bits) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = to_unit(mix64(bits ^ 0x243f6a8885a308d3ULL));
  const double u2 = to_unit(mix64(bits ^ 0x13198a2e03707344ULL));
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(kTwoPi * u2);
}

}  // namespace swapsched::detail
