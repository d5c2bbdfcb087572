#ifndef PREFRANK_RNG_HPP
#define PREFRANK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace prefrank {

/// splitmix64 finalizer; used to derive independent seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for one unit of work, derived from (base, a, b). Adding work units
/// never perturbs the seeds of existing ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

/// Seeded generator with pinned sampling algorithms.
///
/// The engine is mt19937_64, whose bit stream the standard specifies; all
/// distributions are implemented here rather than with std:: distribution
/// objects, so identical seeds give identical draws on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    std::uint64_t x = engine_();
    while (x < threshold) x = engine_();
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via Box-Muller (cosine branch only, stateless).
  double normal() {
    double u1 = uniform01();
    if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Fisher-Yates shuffle of [first, first+n).
  template <typename T>
  void shuffle(T* first, std::size_t n) {
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      T tmp = first[i - 1];
      first[i - 1] = first[j];
      first[j] = tmp;
    }
  }

private:
  std::mt19937_64 engine_;
};

} // namespace prefrank

#endif
