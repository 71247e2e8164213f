#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wncs {

/// splitmix64 output function.
inline uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index`: Mix64(Mix64(seed) + golden * (index + 1)).
inline uint64_t StreamSeed(uint64_t seed, uint64_t index) {
  return Mix64(Mix64(seed) + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// splitmix64 generator. Normal deviates use Box-Muller so results do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) : state_(StreamSeed(seed, stream)) {}

  uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return Mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  uint64_t state_;
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace wncs
