#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qcorr {

// Seeded generator with a fixed, library-independent sampling contract:
// std::mt19937_64 raw output, 53-bit uniforms, Box-Muller normals. Unlike
// std::normal_distribution this yields the same stream on every standard
// library for a given seed.
class Rng {
 public:
  static constexpr const char* kGeneratorId = "mt19937_64/u53/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qcorr
