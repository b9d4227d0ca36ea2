#pragma once

// Dirichlet Schrodinger dynamics (1/i) d_t u = (-1/2 Delta + V) u on the unit
// disk, discretized by Galerkin projection onto a truncated eigenbasis.
//
// Basis functions are phi_i(r e^{iu}) = J_n(alpha r) e^{i m u} / ||psi||
// with m = sign * n, orthonormal in L2 of the disk.

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "diskq/common.hpp"
#include "diskq/kernels.hpp"
#include "diskq/spectrum.hpp"

namespace diskq {

class Basis;
using BasisPtr = std::shared_ptr<const Basis>;

struct ModeIndex {
  int n = 0;
  int k = 1;
};

class Basis {
 public:
  /// Every mode with alpha_{n,k} <= alpha_cut, both signs.
  static BasisPtr up_to(double alpha_cut, const BesselLimits& limits = {});
  /// The listed (n, k) pairs, both signs (n = 0 has a single mode).
  static BasisPtr from_indices(std::span<const ModeIndex> indices, const BesselLimits& limits = {});

  const std::vector<Eigenmode>& modes() const { return modes_; }
  const Eigenmode& operator[](std::size_t i) const { return modes_[i]; }
  std::size_t size() const { return modes_.size(); }
  std::optional<std::size_t> index_of(int n, int k, int sign) const;
  /// Signed angular numbers m_i, in basis order.
  const std::vector<int>& angular() const { return angular_; }
  int max_n() const { return max_n_; }
  double alpha_max() const { return alpha_max_; }

 private:
  explicit Basis(std::vector<Eigenmode> modes);

  std::vector<Eigenmode> modes_;
  std::vector<int> angular_;
  std::map<std::tuple<int, int, int>, std::size_t> lookup_;
  int max_n_ = 0;
  double alpha_max_ = 0.0;
};

struct WaveField {
  BasisPtr basis;
  Eigen::VectorXcd coeffs;
  double time = 0.0;

  static WaveField zero(BasisPtr basis);
  /// The normalized eigenmode psi^{sign}_{n,k}.
  static WaveField mode(BasisPtr basis, int n, int k, int sign = 1);

  double norm() const { return coeffs.norm(); }
  /// Sum (1 + alpha_i^2) |c_i|^2.
  double h1_norm_squared() const;
};

using ComplexFunction = std::function<cplx(Vec2)>;

struct ProjectionOptions {
  int radial_nodes = 256;
  int angular_nodes = 512;
  Exec exec = Exec::parallel;
};

/// Orthogonal projection of f onto span(basis) by polar quadrature.
WaveField project(BasisPtr basis, const ComplexFunction& f, const ProjectionOptions& opt = {});

/// g(z) = (pi h)^{-1/2} exp(-|z - z0|^2 / (2h) + i xi0 . (z - z0) / h).
cplx coherent_value(Vec2 z, Vec2 z0, Vec2 xi0, double h);

/// Projection of the coherent state g_{z0,xi0} at scale h.
WaveField coherent_state(BasisPtr basis, Vec2 z0, Vec2 xi0, double h, const ProjectionOptions& opt = {});

/// z -> u(R^{-beta} z): coefficient c_i picks up e^{-i m_i beta}.
WaveField rotate(const WaveField& u, double beta);

/// Per-angular-number mass sum_{m_i = m} |c_i|^2.
std::map<int, double> angular_mass(const WaveField& u);

struct PotentialSpec {
  std::string descriptor = "zero";
  std::function<double(Vec2)> value = [](Vec2) { return 0.0; };
  bool radial = true;     // V(z) depends on |z| only
  bool constant = true;   // V is constant; value({0, 0}) is that constant

  static PotentialSpec zero();
  static PotentialSpec constant_value(double c);
  /// sum_k coeffs[k] r^k.
  static PotentialSpec radial_polynomial(std::vector<double> coeffs);
  /// slope * x.
  static PotentialSpec x_linear(double slope);
  /// amplitude * exp(-|z - center|^2 / (2 width^2)).
  static PotentialSpec gaussian_bump(Vec2 center, double width, double amplitude);
};

struct HamiltonianOptions {
  int radial_nodes = 256;
  int angular_nodes = 512;
  bool check_convergence = true;
  double convergence_tol = 1e-9;
  Exec exec = Exec::parallel;
};

struct Hamiltonian {
  BasisPtr basis;
  Eigen::MatrixXcd matrix;
  bool angular_blocks = true;  // no coupling between different m
  bool diagonal = true;
  double convergence_residual = 0.0;  // max |M - M_refined|, 0 if not checked

  /// The potential part M_V = H - diag(alpha^2 / 2).
  Eigen::MatrixXcd potential_part() const;
};

/// H = diag(alpha_i^2 / 2) + <phi_i, V phi_j>.
Hamiltonian assemble_hamiltonian(const PotentialSpec& V, BasisPtr basis, const HamiltonianOptions& opt = {});

/// Galerkin matrix of multiplication by V alone (no convergence check).
Eigen::MatrixXcd potential_matrix(const PotentialSpec& V, const Basis& basis, int radial_nodes, int angular_nodes,
                                  Exec exec);

/// exp(-i H t) through a Hermitian eigendecomposition, done per angular
/// number when H does not couple different m.
class Propagator {
 public:
  struct Block {
    std::vector<int> indices;   // basis indices
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;   // columns are eigenvectors on `indices`
    bool identity = false;      // vectors is the identity
  };

  explicit Propagator(const Hamiltonian& H);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& c, double t) const;
  WaveField propagate(const WaveField& u, double t) const;
  /// <u, H u>.
  double energy(const WaveField& u) const;

  const std::vector<Block>& blocks() const { return blocks_; }
  bool angular_blocks() const { return angular_blocks_; }
  const BasisPtr& basis() const { return basis_; }

  /// Coordinates in the eigenbasis, block-concatenated.
  Eigen::VectorXcd to_eigenbasis(const Eigen::VectorXcd& c) const;
  Eigen::VectorXcd from_eigenbasis(const Eigen::VectorXcd& b) const;
  /// Eigenvalues, block-concatenated (matching to_eigenbasis).
  Eigen::VectorXd energies() const;

 private:
  BasisPtr basis_;
  Eigen::MatrixXcd H_;
  std::vector<Block> blocks_;
  bool angular_blocks_ = true;
};

struct PolarGrid {
  std::vector<double> r;
  std::vector<double> u;
};

/// values(i, j) = u(r_i e^{i u_j}).
Eigen::MatrixXcd sample_grid(const WaveField& u, const PolarGrid& grid, Exec exec = Exec::parallel);

/// Exact pointwise evaluation at Cartesian points.
std::vector<cplx> sample_points(const WaveField& u, std::span<const Vec2> points, Exec exec = Exec::parallel);

/// Fast Cartesian evaluation: each angular component's radial profile is
/// tabulated on a uniform r grid and interpolated with cubic Hermite.
class FieldSampler {
 public:
  explicit FieldSampler(const WaveField& u, int radial_points = 4097);
  cplx operator()(Vec2 z) const;

 private:
  int n_points_;
  double dr_;
  std::vector<int> ms_;
  std::vector<std::vector<cplx>> value_;
  std::vector<std::vector<cplx>> slope_;
};

struct TraceOptions {
  bool check = true;
  double tail_band = 0.9;       // modes with alpha > tail_band * alpha_max form the tail
  double tail_fraction = 0.1;   // allowed share of sum |c|^2 alpha^2 in the tail
};

/// Per-mode normal derivative at r = 1: alpha J_n'(alpha) / ||psi||.
Eigen::VectorXd trace_coefficients(const Basis& basis);

/// d u / d r at r = 1 on the angles u_j.
std::vector<cplx> neumann_trace(const WaveField& u, std::span<const double> angles, const TraceOptions& opt = {});

/// Throws TraceDiverging if the tail of the trace series is not small.
void check_trace_tail(const WaveField& u, const TraceOptions& opt = {});

/// 1 - ||P(V u)||^2 / ||V u||^2: share of V u lost to the basis cutoff.
double truncation_leakage(const PotentialSpec& V, const WaveField& u, const ProjectionOptions& opt = {});

}  // namespace diskq
