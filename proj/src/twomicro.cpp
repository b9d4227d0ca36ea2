#include "diskq/twomicro.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace diskq {

cplx AveragedPotential::fourier(int d) const {
  cplx acc = 0.0;
  for (std::size_t l = 0; l < theta.size(); ++l) acc += values[l] * std::polar(1.0, -d * theta[l]);
  return acc / static_cast<double>(theta.size());
}

double averaged_symbol(const PhaseSymbol& a, const RationalAngle& alpha0, double theta, double E,
                       const Tolerances& tol) {
  ActionAngle aa;
  aa.s = 0.0;
  aa.theta = theta;
  aa.E = E;
  aa.J = -E * std::sin(alpha0.value());
  aa.alpha = alpha0.value();
  return orbit_average(a, from_action_angle(aa, tol), alpha0, tol);
}

AveragedPotential averaged_symbol_grid(const PhaseSymbol& a, const RationalAngle& alpha0, int theta_points,
                                       double E, const Tolerances& tol) {
  if (theta_points < 1) throw InvalidArgument("averaged potential: empty theta grid");
  AveragedPotential out;
  out.alpha0 = alpha0;
  for (int l = 0; l < theta_points; ++l) {
    const double th = two_pi * l / theta_points;
    out.theta.push_back(th);
    out.values.push_back(averaged_symbol(a, alpha0, th, E, tol));
  }
  return out;
}

AveragedPotential averaged_potential(const PotentialSpec& V, const RationalAngle& alpha0, int theta_points,
                                     const Tolerances& tol) {
  if (V.constant) {
    AveragedPotential out;
    out.alpha0 = alpha0;
    const double c = V.value({0.0, 0.0});
    for (int l = 0; l < theta_points; ++l) {
      out.theta.push_back(two_pi * l / theta_points);
      out.values.push_back(c);
    }
    return out;
  }
  const auto& f = V.value;
  return averaged_symbol_grid([&f](Vec2 z, Vec2) { return f(z); }, alpha0, theta_points, 1.0, tol);
}

FloquetOperator::FloquetOperator(const RationalAngle& alpha0, double omega, int cutoff,
                                 const AveragedPotential* potential)
    : alpha0_(alpha0), omega_(omega), cutoff_(cutoff) {
  if (cutoff < 0) throw InvalidArgument("FloquetOperator: negative cutoff");
  if (std::abs(alpha0.value()) >= pi / 2) throw InvalidArgument("FloquetOperator: tangent angle");
  const double shift = omega / two_pi;
  center_ = -static_cast<int>(std::lround(shift));
  const double c = std::cos(alpha0.value());
  cos2_ = c * c;
  const int n = dimension();
  H_ = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double k = label(i) + shift;
    H_(i, i) = 0.5 * k * k;
  }
  if (potential) {
    if (static_cast<int>(potential->theta.size()) <= 4 * cutoff)
      throw InvalidArgument("FloquetOperator: theta grid too coarse for the cutoff");
    std::vector<cplx> vhat(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) vhat[d + n - 1] = potential->fourier(d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) H_(i, j) += cos2_ * vhat[i - j + n - 1];
    for (int i = 0; i < n; ++i) H_(i, i) = H_(i, i).real();
  }
  diagonal_ = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && H_(i, j) != cplx(0.0)) diagonal_ = false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H_);
  energies_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Eigen::MatrixXcd FloquetOperator::propagator(double t) const {
  const int n = dimension();
  if (diagonal_) {
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) U(i, i) = std::polar(1.0, -t * H_(i, i).real() / cos2_);
    return U;
  }
  Eigen::VectorXcd phases(n);
  for (int i = 0; i < n; ++i) phases[i] = std::polar(1.0, -t * energies_[i] / cos2_);
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Eigen::MatrixXcd FloquetOperator::multiplication(const AveragedPotential& f) const {
  const int n = dimension();
  std::vector<cplx> fhat(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) fhat[d + n - 1] = f.fourier(d);
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = fhat[i - j + n - 1];
  return A;
}

Eigen::VectorXcd floquet_propagate(const Eigen::VectorXcd& v, double t, const FloquetOperator& op,
                                   double tail_tol) {
  if (v.size() != op.dimension()) throw InvalidArgument("floquet_propagate: dimension mismatch");
  if (tail_tol >= 0.0 && v.size() > 0) {
    const double total = v.squaredNorm();
    const double tail = std::norm(v[0]) + (v.size() > 1 ? std::norm(v[v.size() - 1]) : 0.0);
    if (total > 0.0 && tail > tail_tol * total)
      throw CutoffTooSmall("floquet_propagate: outermost Fourier modes carry " + std::to_string(tail / total) +
                           " of the mass");
  }
  return op.propagator(t) * v;
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void DensityMatrix::validate(double tol) const {
  if (rho.rows() != rho.cols()) throw InvalidArgument("DensityMatrix: not square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol * std::max(1.0, rho.cwiseAbs().maxCoeff()))
    throw InvalidArgument("DensityMatrix: not Hermitian");
  if (rho.size() > 0 && eigenvalues().minCoeff() < -tol) throw InvalidArgument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& v) { return {v * v.adjoint()}; }

DensityMatrix propagate_density(const DensityMatrix& s0, double t, const FloquetOperator& op) {
  if (s0.rho.rows() != op.dimension()) throw InvalidArgument("propagate_density: dimension mismatch");
  if (op.diagonal()) {
    // Phases of differences, so the diagonal is left untouched.
    DensityMatrix out = s0;
    const auto& H = op.matrix();
    for (Eigen::Index i = 0; i < out.rho.rows(); ++i)
      for (Eigen::Index j = 0; j < out.rho.cols(); ++j)
        if (i != j) out.rho(i, j) *= std::polar(1.0, -t * (H(i, i).real() - H(j, j).real()) / op.time_scale());
    return out;
  }
  const auto U = op.propagator(t);
  DensityMatrix out{U * s0.rho * U.adjoint()};
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
  return out;
}

double nu_functional(const DensityMatrix& s, const PhaseSymbol& a, const FloquetOperator& op, double E, double H,
                     int theta_points, double h_tol) {
  if (std::abs(H - 0.5 * E * E) > h_tol) return 0.0;
  if (theta_points <= 4 * op.cutoff()) throw InvalidArgument("nu_functional: theta grid too coarse");
  const auto avg = averaged_symbol_grid(a, op.alpha0(), theta_points, E);
  const auto A = op.multiplication(avg);
  return (A * s.rho).trace().real();
}

}  // namespace diskq
