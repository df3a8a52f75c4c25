#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace skillmon {

/// Seeded generator with a fixed Gaussian transform. std::normal_distribution
/// is implementation-defined, so Box-Muller is spelled out here to keep
/// traces reproducible across standard libraries. Every gaussian() consumes
/// exactly two engine draws.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian(double mean, double sigma) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * radius * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace skillmon
