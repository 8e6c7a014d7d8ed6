#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nilconv {

/// Seeded generator with platform-independent transforms. The standard
/// distributions are implementation-defined, so uniform and normal
/// draws are derived from raw 64-bit output here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Box-Muller, one value per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Derived stream for sub-task i; stable under changes elsewhere.
  Rng fork(std::uint64_t i) const { return Rng(mix(seed_of() ^ (0x9e3779b97f4a7c15ULL * (i + 1)))); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t seed_of() const {
    std::mt19937_64 copy = eng_;
    return copy();
  }
  std::mt19937_64 eng_;
};

}  // namespace nilconv
