#pragma once

// Billiard dynamics on the closed unit disk.
//
// Phase-space points are (z, xi) with |z| <= 1. Boundary points are kept
// together with the side of the reflection they sit on; (z, xi) and
// (z, sigma_z(xi)) describe the same point of the billiard phase space.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diskq/common.hpp"

namespace diskq {

enum class Side { interior, incoming, outgoing };

struct PhasePoint {
  Vec2 z;
  Vec2 xi;
  Side side = Side::interior;

  /// Builds a point and derives the side flag from |z| and sign(z . xi).
  static PhasePoint make(Vec2 z, Vec2 xi, const Tolerances& tol = {});
};

struct ActionAngle {
  double s = 0.0;
  double theta = 0.0;
  double E = 1.0;
  double J = 0.0;
  double alpha = 0.0;  // -arcsin(J / E)
};

/// Level set T(E, J) together with the normalizer of its invariant measure.
struct InvariantTorus {
  double E = 1.0;
  double J = 0.0;

  /// Half-length of every chord, sqrt(1 - (J/E)^2).
  double half_chord() const;
  /// c(E, J) = 1 / (area of T(E, J) in (s, theta)).
  double normalizer() const;
};

/// Incidence angle pi * p / q with gcd(p, q) = 1 and |p/q| <= 1/2.
class RationalAngle {
 public:
  RationalAngle(std::int64_t p, std::int64_t q);

  /// Parses "p/q" (the angle is pi * p / q).
  static RationalAngle parse(const std::string& text);

  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  double value() const { return pi * static_cast<double>(p_) / static_cast<double>(q_); }
  std::string str() const;

  /// Number of chords after which every orbit of the alpha0-flow closes.
  std::int64_t chord_count() const;
  /// Period of the alpha0-flow: two time units per chord.
  double period() const { return 2.0 * static_cast<double>(chord_count()); }

  auto operator<=>(const RationalAngle&) const = default;

 private:
  std::int64_t p_;
  std::int64_t q_;
};

using PhaseSymbol = std::function<double(Vec2 z, Vec2 xi)>;

/// sigma_z(xi) = xi - 2 (z . xi) z for |z| = 1.
Vec2 reflect(Vec2 z, Vec2 xi, const Tolerances& tol = {});

ActionAngle to_action_angle(const PhasePoint& p);
PhasePoint from_action_angle(const ActionAngle& a, const Tolerances& tol = {});

/// Largest entry of D^T W D - W0, where D is the central-difference Jacobian
/// of (s, theta, E, J) -> (z, xi), W the matrix of dxi ^ dz and W0 that of
/// dE ^ ds + dJ ^ dtheta. Zero up to truncation error when the map is
/// symplectic.
double symplectic_defect(const ActionAngle& a, double step = 1e-6);

double angular_momentum(Vec2 z, Vec2 xi);
/// alpha = -arcsin(J / |xi|), clamped to [-pi/2, pi/2].
double incidence_angle(Vec2 z, Vec2 xi);

/// Free flight with specular reflection; negative tau runs the flow backwards.
PhasePoint billiard_flow(const PhasePoint& p, double tau, const Tolerances& tol = {});

/// Poincare map on the outgoing boundary section S+.
PhasePoint first_return(Vec2 z, Vec2 xi, const Tolerances& tol = {});

/// The flow phi^tau_{alpha0}: billiard flight at speed cos(alpha) combined
/// with rotation at rate (alpha0 - alpha). All of its orbits are periodic.
PhasePoint flow_alpha0(const PhasePoint& p, double tau, const RationalAngle& alpha0,
                       const Tolerances& tol = {});

/// Closed-form evaluation of flow_alpha0 in action-angle coordinates
/// (s advances at rate cos(alpha), each wall hit adds pi + 2 alpha to theta).
ActionAngle flow_alpha0_action_angle(const ActionAngle& a, double tau, const RationalAngle& alpha0);

/// Period of the alpha0-flow orbit through p (infinite for a fixed point).
double orbit_period(const PhasePoint& p, const RationalAngle& alpha0, const Tolerances& tol = {});

/// Exact one-period average of a along the alpha0-flow orbit through p.
/// Each inter-bounce segment is integrated with Gauss-Legendre.
double orbit_average(const PhaseSymbol& a, const PhasePoint& p, const RationalAngle& alpha0,
                     const Tolerances& tol = {}, int nodes_per_segment = 32);

/// Samples of lambda_{E,J}: each point uniform in (s, theta), the set
/// stratified (Latin hypercube) so that both marginals are nearly exact.
std::vector<PhasePoint> sample_torus(const InvariantTorus& t, std::size_t n, std::uint64_t seed,
                                     const Tolerances& tol = {});

/// Smallest-denominator p/q with |alpha - pi p/q| < tol and q <= q_max.
std::optional<RationalAngle> classify_angle(double alpha, std::int64_t q_max, double tol);

}  // namespace diskq
