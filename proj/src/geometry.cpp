#include "diskq/geometry.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "diskq/quadrature.hpp"

namespace diskq {

namespace {

Side side_of(Vec2 z, Vec2 xi, const Tolerances& tol) {
  if (std::abs(norm(z) - 1.0) > tol.geom) return Side::interior;
  return dot(z, xi) > 0.0 ? Side::outgoing : Side::incoming;
}

// Smallest t > 0 with |z + t xi| = 1, for |z| <= 1. Uses the
// cancellation-free branch of the quadratic formula.
double exit_time(Vec2 z, Vec2 xi, bool on_boundary) {
  const double a = dot(xi, xi);
  const double b = 2.0 * dot(z, xi);
  const double c = on_boundary ? 0.0 : std::min(0.0, dot(z, z) - 1.0);
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  if (b >= 0.0) {
    const double denom = b + disc;
    return denom > 0.0 ? -2.0 * c / denom : 0.0;
  }
  return (-b + disc) / (2.0 * a);
}

PhasePoint flow_forward(PhasePoint p, double tau, const Tolerances& tol) {
  Vec2 z = p.z;
  Vec2 xi = p.xi;
  bool on_boundary = std::abs(norm(z) - 1.0) <= tol.geom;
  if (on_boundary) {
    z = z / norm(z);
    if (dot(z, xi) > 0.0) xi = reflect(z, xi, tol);
  }
  double remaining = tau;
  while (remaining > 0.0) {
    const double t_hit = exit_time(z, xi, on_boundary);
    if (remaining < t_hit) {
      z = z + remaining * xi;
      on_boundary = false;
      break;
    }
    z = z + t_hit * xi;
    z = z / norm(z);
    xi = reflect(z, xi, tol);
    remaining -= t_hit;
    on_boundary = true;
  }
  PhasePoint out{z, xi, Side::interior};
  if (on_boundary) out.side = dot(z, xi) > 0.0 ? Side::outgoing : Side::incoming;
  else out.side = side_of(z, xi, tol);
  return out;
}

}  // namespace

PhasePoint PhasePoint::make(Vec2 z, Vec2 xi, const Tolerances& tol) {
  return {z, xi, side_of(z, xi, tol)};
}

double InvariantTorus::half_chord() const {
  const double r = J / E;
  return std::sqrt(std::max(0.0, 1.0 - r * r));
}

double InvariantTorus::normalizer() const {
  return 1.0 / (two_pi * 2.0 * half_chord());
}

RationalAngle::RationalAngle(std::int64_t p, std::int64_t q) {
  if (q == 0) throw InvalidArgument("RationalAngle: zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p, q);
  p_ = p / g;
  q_ = q / g;
  if (2 * std::abs(p_) > q_) throw InvalidArgument("RationalAngle: |p/q| must not exceed 1/2");
}

RationalAngle RationalAngle::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return RationalAngle(std::stoll(text), 1);
    return RationalAngle(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw InvalidArgument("cannot parse rational angle '" + text + "'");
  }
}

std::string RationalAngle::str() const {
  return std::to_string(p_) + "/" + std::to_string(q_);
}

std::int64_t RationalAngle::chord_count() const {
  // Each chord advances the foot point by pi + 2 alpha0 (mod 2 pi); the
  // orbit closes after the smallest m with m (q + 2p) = 0 mod 2q.
  const std::int64_t num = q_ + 2 * p_;
  const std::int64_t g = std::gcd(num, 2 * q_);
  return 2 * q_ / g;
}

Vec2 reflect(Vec2 z, Vec2 xi, const Tolerances& tol) {
  if (std::abs(norm(z) - 1.0) > tol.geom) throw NotOnBoundary("reflect: |z| != 1");
  return xi - 2.0 * dot(z, xi) * z;
}

double angular_momentum(Vec2 z, Vec2 xi) { return dot(z, perp(xi)); }

double incidence_angle(Vec2 z, Vec2 xi) {
  const double ratio = std::clamp(angular_momentum(z, xi) / norm(xi), -1.0, 1.0);
  return -std::asin(ratio);
}

ActionAngle to_action_angle(const PhasePoint& p) {
  const double E = norm(p.xi);
  if (E == 0.0) throw ZeroMomentum("to_action_angle: xi = 0");
  ActionAngle a;
  a.E = E;
  a.J = angular_momentum(p.z, p.xi);
  a.theta = wrap_angle(std::atan2(-p.xi.x, p.xi.y));
  a.s = dot(p.z, p.xi) / E;
  a.alpha = -std::asin(std::clamp(a.J / E, -1.0, 1.0));
  return a;
}

PhasePoint from_action_angle(const ActionAngle& a, const Tolerances& tol) {
  const Vec2 omega{-std::sin(a.theta), std::cos(a.theta)};
  const Vec2 normal{std::cos(a.theta), std::sin(a.theta)};
  return PhasePoint::make(a.s * omega + (a.J / a.E) * normal, a.E * omega, tol);
}

double symplectic_defect(const ActionAngle& a, double step) {
  auto image = [](const ActionAngle& b) {
    const Vec2 omega{-std::sin(b.theta), std::cos(b.theta)};
    const Vec2 normal{std::cos(b.theta), std::sin(b.theta)};
    const Vec2 z = b.s * omega + (b.J / b.E) * normal;
    const Vec2 xi = b.E * omega;
    return std::array<double, 4>{z.x, z.y, xi.x, xi.y};
  };
  // Columns of D in the order s, theta, E, J.
  double D[4][4];
  for (int c = 0; c < 4; ++c) {
    ActionAngle lo = a, hi = a;
    double* lo_v[4] = {&lo.s, &lo.theta, &lo.E, &lo.J};
    double* hi_v[4] = {&hi.s, &hi.theta, &hi.E, &hi.J};
    *lo_v[c] -= step;
    *hi_v[c] += step;
    const auto fl = image(lo);
    const auto fh = image(hi);
    for (int r = 0; r < 4; ++r) D[r][c] = (fh[r] - fl[r]) / (2.0 * step);
  }
  // W(u, v) = u^T W v with dxi_i ^ dz_i giving W(xi_i, z_i) = 1. Ordering the
  // action-angle variables as (s, theta, E, J) makes W0 the same matrix.
  const double W[4][4] = {{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
  const auto& W0 = W;
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) acc += D[r][i] * W[r][c] * D[c][j];
      worst = std::max(worst, std::abs(acc - W0[i][j]));
    }
  return worst;
}

PhasePoint billiard_flow(const PhasePoint& p, double tau, const Tolerances& tol) {
  const double E = norm(p.xi);
  if (E == 0.0) throw ZeroMomentum("billiard_flow: xi = 0");
  if (std::abs(angular_momentum(p.z, p.xi)) / E > 1.0 - tol.tangent)
    throw GlidingRay("billiard_flow: trajectory is tangent to the boundary");
  if (tau >= 0.0) return flow_forward(p, tau, tol);
  PhasePoint reversed{p.z, -p.xi, Side::interior};
  auto out = flow_forward(reversed, -tau, tol);
  out.xi = -out.xi;
  if (out.side != Side::interior) out.side = out.side == Side::incoming ? Side::outgoing : Side::incoming;
  return out;
}

PhasePoint first_return(Vec2 z, Vec2 xi, const Tolerances& tol) {
  if (std::abs(norm(z) - 1.0) > tol.geom) throw NotOnBoundary("first_return: |z| != 1");
  if (dot(z, xi) <= 0.0) throw NotOutgoing("first_return: z . xi <= 0");
  const double E = norm(xi);
  const double ratio = std::clamp(angular_momentum(z, xi) / E, -1.0, 1.0);
  const double cos_alpha = std::sqrt(1.0 - ratio * ratio);
  const Vec2 reflected = reflect(z, xi, tol);
  Vec2 next = z + (2.0 * cos_alpha / E) * reflected;
  next = next / norm(next);
  return {next, reflected, Side::outgoing};
}

PhasePoint flow_alpha0(const PhasePoint& p, double tau, const RationalAngle& alpha0,
                       const Tolerances& tol) {
  const double E = norm(p.xi);
  if (E == 0.0) throw ZeroMomentum("flow_alpha0: xi = 0");
  const double alpha = incidence_angle(p.z, p.xi);
  const double rotation = (alpha0.value() - alpha) * tau;
  const double ratio = std::abs(angular_momentum(p.z, p.xi)) / E;
  PhasePoint moved = p;
  if (ratio <= 1.0 - tol.tangent) {
    moved = billiard_flow(p, tau * std::cos(alpha) / E, tol);
  }
  // Rotation commutes with the billiard flow and preserves alpha.
  PhasePoint out{rotate(moved.z, rotation), rotate(moved.xi, rotation), moved.side};
  return out;
}

ActionAngle flow_alpha0_action_angle(const ActionAngle& a, double tau, const RationalAngle& alpha0) {
  ActionAngle out = a;
  const double cos_alpha = std::cos(a.alpha);
  double theta = a.theta + (alpha0.value() - a.alpha) * tau;
  if (cos_alpha > 0.0) {
    // Unfold s on the line, then fold back into [-cos a, cos a].
    const double unfolded = a.s + tau * cos_alpha + cos_alpha;
    const double chord = 2.0 * cos_alpha;
    const double hits = std::floor(unfolded / chord);
    out.s = unfolded - hits * chord - cos_alpha;
    theta += hits * (pi + 2.0 * a.alpha);
  }
  out.theta = wrap_angle(theta);
  return out;
}

double orbit_period(const PhasePoint& p, const RationalAngle& alpha0, const Tolerances& tol) {
  const double E = norm(p.xi);
  if (E == 0.0) throw ZeroMomentum("orbit_period: xi = 0");
  const double ratio = std::abs(angular_momentum(p.z, p.xi)) / E;
  if (ratio <= 1.0 - tol.tangent) return alpha0.period();
  const double rate = std::abs(alpha0.value() - incidence_angle(p.z, p.xi));
  return rate > 0.0 ? two_pi / rate : std::numeric_limits<double>::infinity();
}

double orbit_average(const PhaseSymbol& a, const PhasePoint& p, const RationalAngle& alpha0,
                     const Tolerances& tol, int nodes_per_segment) {
  const ActionAngle start = to_action_angle(p);
  const double period = orbit_period(p, alpha0, tol);
  if (!std::isfinite(period)) return a(p.z, p.xi);

  const auto ref = gauss_legendre(nodes_per_segment, 0.0, 1.0);
  auto integrate = [&](double t0, double t1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double tau = t0 + (t1 - t0) * ref.nodes[i];
      const auto q = from_action_angle(flow_alpha0_action_angle(start, tau, alpha0), tol);
      acc += ref.weights[i] * a(q.z, q.xi);
    }
    return acc * (t1 - t0);
  };

  const double cos_alpha = std::cos(start.alpha);
  std::vector<double> breaks{0.0};
  if (std::abs(start.J) / start.E <= 1.0 - tol.tangent && cos_alpha > 0.0) {
    // Wall hits occur when s reaches +cos(alpha), every two time units.
    double t = (cos_alpha - start.s) / cos_alpha;
    if (t <= 1e-14) t += 2.0;
    for (; t < period - 1e-14; t += 2.0) breaks.push_back(t);
  } else {
    // Pure rotation: split into pieces so the integrand stays well resolved.
    const int pieces = 16;
    for (int k = 1; k < pieces; ++k) breaks.push_back(period * k / pieces);
  }
  breaks.push_back(period);

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) total += integrate(breaks[k], breaks[k + 1]);
  return total / period;
}

std::vector<PhasePoint> sample_torus(const InvariantTorus& t, std::size_t n, std::uint64_t seed,
                                     const Tolerances& tol) {
  if (t.E <= 0.0 || std::abs(t.J) >= t.E * (1.0 - tol.tangent))
    throw DegenerateTorus("sample_torus: |J| must be below E");
  // Latin hypercube: one point in each of the n strata of s and of theta,
  // strata paired by a seeded permutation.
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::size_t> pairing(n);
  std::iota(pairing.begin(), pairing.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(pairing[i - 1], pairing[rng() % i]);
  const double half = t.half_chord();
  std::vector<PhasePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ActionAngle a;
    a.E = t.E;
    a.J = t.J;
    a.s = -half + 2.0 * half * (static_cast<double>(i) + unit()) / static_cast<double>(n);
    a.theta = two_pi * (static_cast<double>(pairing[i]) + unit()) / static_cast<double>(n);
    out.push_back(from_action_angle(a, tol));
  }
  return out;
}

std::optional<RationalAngle> classify_angle(double alpha, std::int64_t q_max, double tol) {
  const double x = alpha / pi;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const auto p = static_cast<std::int64_t>(std::llround(x * static_cast<double>(q)));
    if (2 * std::abs(p) > q) continue;
    if (std::abs(alpha - pi * static_cast<double>(p) / static_cast<double>(q)) < tol)
      return RationalAngle(p, q);
  }
  return std::nullopt;
}

}  // namespace diskq
