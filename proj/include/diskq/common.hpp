#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diskq {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// xi^perp = (xi_y, -xi_x), so that J = z . xi^perp = x xi_y - y xi_x.
constexpr Vec2 perp(Vec2 v) { return {v.y, -v.x}; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Numeric tolerances shared by the geometric and quadrature routines.
struct Tolerances {
  double geom = 1e-12;
  double tangent = 1e-9;
  double flow = 1e-10;
  double quad = 1e-8;
};

// Error hierarchy. Every failure mode named by an operation has its own type
// so callers (and the CLI exit-code mapping) can discriminate.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DISKQ_ERROR(Name)            \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

DISKQ_ERROR(NotOnBoundary);
DISKQ_ERROR(ZeroMomentum);
DISKQ_ERROR(GlidingRay);
DISKQ_ERROR(NotOutgoing);
DISKQ_ERROR(DegenerateTorus);
DISKQ_ERROR(OutOfRange);
DISKQ_ERROR(CausticTooClose);
DISKQ_ERROR(SameOrder);
DISKQ_ERROR(QuadratureUnderResolved);
DISKQ_ERROR(TraceDiverging);
DISKQ_ERROR(GridTooCoarse);
DISKQ_ERROR(AliasingDetected);
DISKQ_ERROR(CutoffTooSmall);
DISKQ_ERROR(ZeroDatum);
DISKQ_ERROR(InvalidArgument);

#undef DISKQ_ERROR

}  // namespace diskq
