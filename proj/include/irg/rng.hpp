#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace irg {

/// Stream derivation is counter-based: a root seed plus a tag sequence
/// (phase, index, index) maps to an independent engine seed through
/// splitmix64 finalization. Identical tags give identical streams no
/// matter which thread asks, so results never depend on scheduling.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag * kGolden + 1));
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive(derive(seed, a), b);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

// Phase tags; keep values stable, they are part of the reproducibility
// contract for stored seeds.
enum Phase : std::uint64_t {
  kPhaseTypes = 1,
  kPhaseEdges = 2,
  kPhaseCoupling = 3,
  kPhaseTruncation = 4,
  kPhaseTrial = 5,
  kPhasePick = 6,
};

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform double in [0, 1). Bypasses std::uniform_real_distribution,
/// whose output is not pinned across standard library implementations.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
inline double uniform01_open_low(Engine& eng) { return 1.0 - uniform01(eng); }

/// Number of failures before the next success in Bernoulli(q) trials.
/// Used for geometric skipping over implicit pair enumerations.
inline std::uint64_t geometric_skip(Engine& eng, double q) {
  if (q >= 1.0) return 0;
  const double u = uniform01_open_low(eng);
  const double g = std::floor(std::log(u) / std::log1p(-q));
  if (g >= 9.2e18) return UINT64_MAX;
  return static_cast<std::uint64_t>(g);
}

/// Uniform integer in [0, n). Rejection from the top keeps the draw unbiased
/// and reproducible.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

}  // namespace rng
}  // namespace irg
