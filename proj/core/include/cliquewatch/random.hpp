#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cliquewatch {

__extension__ typedef unsigned __int128 Uint128;

// Draws built directly on mt19937_64 output. The <random> distributions
// are implementation-defined; these are not, so a seed gives the same
// stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<Uint128>(engine_()) * n) >> 64);
  }

  // Box-Muller; one draw per call, the partner variate is discarded.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Gamma(1, 1).
  double exponential() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cliquewatch
