#pragma once

#include <cstdint>
#include <random>

namespace rsipm {

// SplitMix64 mixing step; used to derive independent seed streams
// (per outer iteration, per solver kind) from one user-facing seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG wrapper. Distributions are implemented here rather than
// via <random>'s distribution classes because those are implementation
// defined; this keeps realized sketches and synthetic problems reproducible
// for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the polar (Marsaglia) method; second value cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Unbiased integer in [0, bound) by rejection from the top 32 bits.
  std::uint32_t below(std::uint32_t bound) {
    const std::uint64_t span = std::uint64_t(1) << 32;
    const std::uint64_t limit = span - span % bound;
    for (;;) {
      const std::uint64_t r = next_u64() >> 32;
      if (r < limit) return static_cast<std::uint32_t>(r % bound);
    }
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rsipm
