#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dyad {

// splitmix64. The single generator behind every stochastic operation in the
// toolkit: weight init, epoch shuffles, dropout masks, synthetic trajectories.
// All consumers draw in a fixed documented order, so a run is reproducible
// bit-for-bit from its seed.
struct SplitMix64 {
  uint64_t state = 0;

  SplitMix64() = default;
  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 significant bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // modulo draw; bias is negligible for the index ranges used here
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Box-Muller without caching: consumes exactly two uniforms per draw so the
  // stream position is independent of the values drawn.
  double normal(double mean, double stddev) {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double two_pi = 6.28318530717958647692;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * (r * std::cos(two_pi * u2));
  }

  // Derives an independent stream for substream `index` (per-experiment
  // seeding in the generator, per-stage seeding in training).
  static uint64_t mix(uint64_t seed, uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    return g.next_u64();
  }
};

// Fisher-Yates, descending index order.
template <class T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  if (v.size() < 2) return;
  for (size_t i = v.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i + 1));
    std::swap(v[i], v[j]);
  }
}

}  // namespace dyad
