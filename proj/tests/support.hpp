#pragma once

// Shared helpers for the unit tests.

#include <complex>
#include <cstdint>
#include <random>

#include "diskq/common.hpp"
#include "diskq/geometry.hpp"

namespace testing {

using namespace diskq;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(g_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(g_); }
  std::complex<double> complex_normal() { return {normal(), normal()}; }

 private:
  std::mt19937_64 g_;
};

inline double distance(const PhasePoint& a, const PhasePoint& b) {
  return std::max(norm(a.z - b.z), norm(a.xi - b.xi));
}

// Interior point with |z|^2 <= r2_max and a unit momentum.
inline PhasePoint random_point(Rng& rng, double r2_max = 0.8, double speed = 1.0) {
  const double r = std::sqrt(rng.uniform(0.0, r2_max));
  const double phi = rng.uniform(0.0, two_pi);
  const double dir = rng.uniform(0.0, two_pi);
  return PhasePoint::make({r * std::cos(phi), r * std::sin(phi)}, {speed * std::cos(dir), speed * std::sin(dir)});
}

}  // namespace testing
