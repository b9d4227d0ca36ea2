#pragma once

// Data-parallel inner loops. Every kernel takes an execution policy; the
// serial and OpenMP variants run the same per-element body, so their results
// agree bit for bit. The *_reference functions are direct, unfactorized
// serial evaluations kept as test oracles and benchmark baselines.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "diskq/common.hpp"
#include "diskq/quadrature.hpp"
#include "diskq/spectrum.hpp"

namespace diskq {

enum class Exec { serial, parallel };

using cplx = std::complex<double>;

int max_threads();
void set_threads(int n);

namespace kernels {

/// table(i, q) = J_{n_i}(alpha_i r_q) / ||psi_i||.
Eigen::MatrixXd radial_table(std::span<const Eigenmode> modes, std::span<const double> r, Exec exec);

/// vhat(q, d + d_max) = (1 / N_u) sum_l V(r_q, u_l) e^{-i d u_l}, |d| <= d_max,
/// for samples v(q, l) on a periodic trapezoid grid in u.
Eigen::MatrixXcd angular_coefficients(const Eigen::MatrixXd& v, int d_max, Exec exec);

/// Galerkin matrix of a multiplication operator,
/// M_ij = 2 pi sum_q w_q r_q T_iq T_jq vhat(q, m_i - m_j).
/// With radial_only the entries with m_i != m_j are set to exactly zero.
Eigen::MatrixXcd potential_matrix(const Eigen::MatrixXd& table, std::span<const int> angular,
                                  const QuadratureRule& r_rule, const Eigen::MatrixXcd& vhat, int d_max,
                                  bool radial_only, Exec exec);

/// Direct tensor-product quadrature of <phi_i, V phi_j>; O(K^2 N_r N_u).
Eigen::MatrixXcd potential_matrix_reference(const Eigen::MatrixXd& table, std::span<const int> angular,
                                            const QuadratureRule& r_rule, const QuadratureRule& u_rule,
                                            const Eigen::MatrixXd& v);

/// Axes of a phase-space grid (z0, xi0) for coherent-state overlaps.
struct PhaseAxes {
  std::vector<double> x0, y0, px, py;
  std::size_t size() const { return x0.size() * y0.size() * px.size() * py.size(); }
  std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return ((a * y0.size() + b) * px.size() + c) * py.size() + d;
  }
};

/// <g_{z0,xi0}, f> for f sampled on the Cartesian grid xs x ys with cell
/// area dA (f(i, j) = f(xs[i], ys[j])). g is the L2-normalized Gaussian
/// coherent state of width sqrt(h). Separable contraction, x first.
std::vector<cplx> coherent_overlaps(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                    std::span<const double> ys, double dA, const PhaseAxes& axes, double h,
                                    Exec exec);

std::vector<cplx> coherent_overlaps_reference(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                              std::span<const double> ys, double dA, const PhaseAxes& axes,
                                              double h);

/// fhat(E_j omega(theta_l)) with fhat(xi) = int e^{-i xi.z} f(z) dz, from
/// samples on a Cartesian grid; out(j, l).
Eigen::MatrixXcd polar_fourier(const Eigen::MatrixXcd& f, std::span<const double> xs, std::span<const double> ys,
                               double dA, std::span<const double> energies, std::span<const double> thetas,
                               Exec exec);

Eigen::MatrixXcd polar_fourier_reference(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                         std::span<const double> ys, double dA,
                                         std::span<const double> energies, std::span<const double> thetas);

/// sum_i c_i phi_i(z_p) for Cartesian points inside the closed disk.
std::vector<cplx> sample_points(std::span<const Eigenmode> modes, const Eigen::VectorXcd& coeffs,
                                std::span<const Vec2> points, Exec exec);

}  // namespace kernels
}  // namespace diskq
