#pragma once

#include <cstdint>

namespace cbp::rng {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so node batches can be produced in any order by any worker.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

/// Uniform in the open interval (0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (static_cast<double>(hash3(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double inverse_normal_cdf(double u);

/// Standard normal draw via the inverse CDF.
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return inverse_normal_cdf(uniform(seed, stream, counter));
}

}  // namespace cbp::rng
