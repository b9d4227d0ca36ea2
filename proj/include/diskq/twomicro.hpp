#pragma once

// One-dimensional effective dynamics on rational-angle tori: orbit-averaged
// potentials, Floquet operators on H_omega, density-matrix conjugation and
// the trace pairing nu.

#include <vector>

#include <Eigen/Dense>

#include "diskq/evolve.hpp"
#include "diskq/geometry.hpp"

namespace diskq {

/// <a>_{alpha0}(theta) on the torus J = -E sin(alpha0), sampled on a periodic
/// theta grid.
struct AveragedPotential {
  RationalAngle alpha0{0, 1};
  std::vector<double> theta;
  std::vector<double> values;

  /// Fourier coefficient (1/N) sum_l values_l e^{-i d theta_l}.
  cplx fourier(int d) const;
};

/// Orbit average of a through Phi(0, theta, E, -E sin(alpha0)).
double averaged_symbol(const PhaseSymbol& a, const RationalAngle& alpha0, double theta, double E = 1.0,
                       const Tolerances& tol = {});

AveragedPotential averaged_potential(const PotentialSpec& V, const RationalAngle& alpha0, int theta_points,
                                     const Tolerances& tol = {});
AveragedPotential averaged_symbol_grid(const PhaseSymbol& a, const RationalAngle& alpha0, int theta_points,
                                       double E = 1.0, const Tolerances& tol = {});

/// H_omega = -1/2 d^2/dtheta^2 + cos^2(alpha0) <V> on the shifted Fourier
/// basis (2 pi)^{-1/2} e^{i (m + omega / 2 pi) theta}, m = m_c - M .. m_c + M,
/// m_c = -round(omega / 2 pi).
class FloquetOperator {
 public:
  FloquetOperator(const RationalAngle& alpha0, double omega, int cutoff, const AveragedPotential* potential = nullptr);

  const RationalAngle& alpha0() const { return alpha0_; }
  double omega() const { return omega_; }
  int cutoff() const { return cutoff_; }
  int dimension() const { return 2 * cutoff_ + 1; }
  /// Fourier label of basis index i.
  int label(int i) const { return center_ - cutoff_ + i; }
  int center() const { return center_; }
  const Eigen::MatrixXcd& matrix() const { return H_; }
  /// cos^2(alpha0), the time scale of the propagator.
  double time_scale() const { return cos2_; }
  /// True when the potential term vanishes (no off-diagonal coupling).
  bool diagonal() const { return diagonal_; }

  /// exp(-i t H / cos^2(alpha0)).
  Eigen::MatrixXcd propagator(double t) const;
  /// Multiplication by a 2 pi-periodic function given on a periodic grid.
  Eigen::MatrixXcd multiplication(const AveragedPotential& f) const;

 private:
  RationalAngle alpha0_;
  double omega_;
  int cutoff_;
  int center_;
  double cos2_;
  bool diagonal_ = true;
  Eigen::MatrixXcd H_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

/// Throws CutoffTooSmall if the two outermost modes carry more than
/// tail_tol of the mass (a negative tail_tol disables the check).
Eigen::VectorXcd floquet_propagate(const Eigen::VectorXcd& v, double t, const FloquetOperator& op,
                                   double tail_tol = 1e-10);

struct DensityMatrix {
  Eigen::MatrixXcd rho;

  double trace() const { return rho.trace().real(); }
  Eigen::VectorXd eigenvalues() const;
  /// Throws InvalidArgument unless Hermitian with eigenvalues >= -tol.
  void validate(double tol = 1e-12) const;

  static DensityMatrix pure(const Eigen::VectorXcd& v);
};

/// sigma(t) = U(t) sigma(0) U(t)^*.
DensityMatrix propagate_density(const DensityMatrix& s0, double t, const FloquetOperator& op);

/// Tr(m_{<a>} sigma) on the fiber (E, H); zero off the characteristic set
/// |H - E^2 / 2| > h_tol.
double nu_functional(const DensityMatrix& s, const PhaseSymbol& a, const FloquetOperator& op, double E, double H,
                     int theta_points = 256, double h_tol = 1e-12);

}  // namespace diskq
