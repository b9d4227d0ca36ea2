#pragma once

// Phase-space measures at a semiclassical scale h: Husimi densities, the exact
// (E, J) pushforward of a wavefield, decomposition by incidence angle, and the
// action-angle transform U.

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "diskq/evolve.hpp"
#include "diskq/geometry.hpp"
#include "diskq/kernels.hpp"

namespace diskq {

// ---------------------------------------------------------------- Husimi

struct HusimiGridSpec {
  int z_points = 30;     // per axis on [-1, 1]
  double xi_min = -1.5;
  double xi_max = 1.5;
  int xi_points = 44;    // per axis on [xi_min, xi_max]
  int field_points = 0;  // per axis of the Cartesian sampling of u; 0 picks from alpha_max
  Exec exec = Exec::parallel;
};

struct HusimiGrid {
  double h = 0.0;
  kernels::PhaseAxes axes;
  std::vector<double> values;  // indexed by axes.index(a, b, c, d); zero where |z0| > 1
  double dz = 0.0;
  double dxi = 0.0;

  /// Riemann sum of the density over the grid.
  double mass() const;
  /// (z0, xi0) of the largest value.
  std::pair<Vec2, Vec2> argmax() const;
};

/// (2 pi h)^{-2} |<g_{z0,xi0}, u>|^2 on the grid; u is extended by zero
/// outside the disk. Throws GridTooCoarse if a spacing exceeds sqrt(h) / 2.
HusimiGrid husimi(const WaveField& u, double h, const HusimiGridSpec& spec = {});

// -------------------------------------------------------- (E, J) measures

struct MomentAtom {
  double E = 0.0;
  double J = 0.0;
  double weight = 0.0;
};

struct PhaseMeasure {
  double h = 1.0;
  std::vector<MomentAtom> atoms;
  double total_mass = 0.0;

  static PhaseMeasure from_atoms(std::vector<MomentAtom> atoms, double h);
};

/// Weight |c_i|^2 at (E, J) = (h alpha_i, h m_i); exact, no quadrature.
PhaseMeasure moment_pushforward(const WaveField& u, double h);

/// Mass per value of J (exact keys h * m are indexed by m).
std::map<int, double> j_marginal(const WaveField& u);

/// int |F_a(E) - F_b(E)| dE for the E-marginal distribution functions.
double e_marginal_distance(const PhaseMeasure& a, const PhaseMeasure& b);

/// Mass of the atoms with |(E, J) - center| <= radius.
double ball_mass(const PhaseMeasure& m, double E, double J, double radius);

struct AlphaPartition {
  std::map<RationalAngle, double> rational;
  double irrational = 0.0;
  double total = 0.0;

  double rational_mass() const;
};

/// Splits the mass by classify_angle(-arcsin(J / E)).
AlphaPartition alpha_decompose(const PhaseMeasure& m, std::int64_t q_max, double tol);
AlphaPartition alpha_decompose(std::span<const double> alphas, std::span<const double> weights, std::int64_t q_max,
                               double tol);

// ------------------------------------------------- Action-angle transform

struct CartesianSamples {
  std::vector<double> xs;
  std::vector<double> ys;
  Eigen::MatrixXcd values;  // values(i, j) = f(xs[i], ys[j])

  double cell_area() const;
  double l2_norm() const;
};

/// Samples f on the square [-half_width, half_width]^2 with n points per axis.
CartesianSamples sample_cartesian(const ComplexFunction& f, double half_width, int n);

struct TransformOptions {
  double e_max = 50.0;
  int e_points = 128;      // midpoint nodes on (0, e_max]
  int theta_points = 256;  // periodic nodes on [0, 2 pi)
  double tail_band = 0.9;  // energies above tail_band * e_max form the tail
  double tail_tol = 1e-6;  // allowed share of spectral mass in the tail
  Exec exec = Exec::parallel;
};

/// Uf(s, theta) = int_0^inf e^{iEs} fhat(E omega(theta)) sqrt(E) dE / (2 pi)^{3/2}
/// with omega(theta) = (-sin theta, cos theta), evaluated on the s grid of
/// one period 2 pi / dE centered at s = 0.
struct ActionAngleField {
  std::vector<double> s;
  std::vector<double> theta;
  std::vector<double> energies;
  Eigen::MatrixXcd spectrum;  // (E_j, theta_l): fhat sqrt(E) / (2 pi)^{3/2}
  Eigen::MatrixXcd values;    // (s_k, theta_l)
  double ds = 0.0;
  double dtheta = 0.0;
  double de = 0.0;
  double tail_share = 0.0;

  double l2_norm() const;
  /// d^2/ds^2 of values, applied in the E representation.
  Eigen::MatrixXcd second_s_derivative() const;
};

ActionAngleField action_angle_transform(const CartesianSamples& f, const TransformOptions& opt = {});

// ---------------------------------------------------- Section invariance

struct WeightedPoint {
  PhasePoint p;
  double weight = 1.0;
};

struct SectionResidual {
  double lhs = 0.0;  // int xi . d_z a d mu
  double rhs = 0.0;  // boundary-difference side
  double residual() const { return std::abs(lhs - rhs); }
};

/// Both sides of the section identity for a (normalized) empirical measure.
/// The boundary side pairs each interior sample with its previous bounce.
SectionResidual section_invariance(std::span<const WeightedPoint> samples, const PhaseSymbol& a,
                                   double step = 1e-5, const Tolerances& tol = {});

double section_invariance_residual(std::span<const WeightedPoint> samples, const PhaseSymbol& a,
                                   double step = 1e-5, const Tolerances& tol = {});

}  // namespace diskq
