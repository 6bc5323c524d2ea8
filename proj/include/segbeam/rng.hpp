#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace segbeam {

// Seeded random stream for scenario synthesis and tests.
//
// Raw bits come from std::mt19937_64, whose output is pinned by the
// standard; every variate is derived from those bits with fixed
// arithmetic. The std <random> distributions are deliberately avoided
// (their algorithms are implementation-defined), so a given seed
// reproduces the same stream on any platform and standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Fixed-point multiply, no modulo bias.
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal, Box-Muller form. Consumes two uniforms per call.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi() * u2);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_gaussian(double variance) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1) * variance);
    return {r * std::cos(two_pi() * u2), r * std::sin(two_pi() * u2)};
  }

 private:
  static constexpr double two_pi() { return 6.283185307179586476925287; }

  std::mt19937_64 engine_;
};

}  // namespace segbeam
