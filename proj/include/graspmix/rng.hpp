#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace graspmix {

// Randomness contract
// -------------------
// Every randomized routine draws from std::mt19937_64, whose output sequence
// is fixed by the C++ standard. The standard <random> distributions are NOT
// used because their algorithms are implementation-defined; the conversions
// below are spelled out instead. Independent sub-streams are keyed by
// (seed, tag, index) and mixed with splitmix64, so work split across threads
// always sees the same numbers as a sequential run.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream tags. Values are part of the output format: changing one changes
/// every file generated with that stream.
enum class Stream : std::uint64_t {
  grasp_seeds = 1,
  offsets = 2,
  synth_scene = 3,
  mixture_full = 4,
  mixture_srp = 5,
  noise = 6,
  synth_task = 7,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream tag, std::uint64_t index = 0) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream tag, std::uint64_t index = 0) : engine_(derive_seed(seed, tag, index)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi); returns lo exactly when the interval is collapsed.
  double uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return lo + (hi - lo) * uniform();
  }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::size_t index(std::size_t n) {
    const auto bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % bound);
  }

  /// Standard normal via Box-Muller (one variate per call).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

/// First m entries of a seeded Fisher-Yates shuffle of [0, n). Requires m <= n.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  return idx;
}

}  // namespace graspmix
