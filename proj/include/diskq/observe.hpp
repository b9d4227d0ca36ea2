#pragma once

// Observability quotients for the Dirichlet Schrodinger flow: time-averaged
// mass in an annular sector, and time-integrated Neumann trace energy on a
// boundary arc.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diskq/evolve.hpp"

namespace diskq {

/// Omega = {r e^{iu} : r in [r_lo, r_hi], u in [u_lo, u_lo + u_len]}.
struct Region {
  double r_lo = 0.0;
  double r_hi = 1.0;
  double u_lo = 0.0;
  double u_len = two_pi;

  static Region annulus(double r_lo, double r_hi);
  static Region sector(double r_lo, double r_hi, double u_lo, double u_len);
  /// "r>0.8", "r<0.5", "0.2<r<0.6", "disk", optionally followed by
  /// ";u=lo:len" (radians).
  static Region parse(const std::string& text);

  bool touches_boundary() const { return r_hi >= 1.0; }
  bool full_circle() const { return u_len >= two_pi; }
  std::string str() const;
  /// Same region rotated by beta.
  Region rotated(double beta) const;
};

struct BoundaryArc {
  double u_lo = 0.0;
  double u_len = two_pi;
  bool full_circle() const { return u_len >= two_pi; }
};

enum class TimeQuadrature { spectral, simpson };

struct ObserveOptions {
  TimeQuadrature time = TimeQuadrature::spectral;
  int min_snapshots = 64;
  int max_snapshots = 4096;
  double richardson_tol = 1e-6;  // simpson only; breach -> QuadratureUnderResolved
  Exec exec = Exec::parallel;
};

/// int_0^T ||U(t) u0||^2_{L2(Omega)} dt / (T ||u0||^2).
double interior_quotient(const WaveField& u0, const Propagator& prop, const Region& region, double T,
                         const ObserveOptions& opt = {});

/// int_0^T ||d_n U(t) u0||^2_{L2(Gamma)} dt / ||u0||^2_{H1}.
double boundary_quotient(const WaveField& u0, const Propagator& prop, const BoundaryArc& arc, double T,
                         const ObserveOptions& opt = {});

/// Gram matrix of the region, <phi_i, 1_Omega phi_j>.
Eigen::MatrixXcd region_gram(const Basis& basis, const Region& region);

/// Gram matrix of the boundary arc for the Neumann traces.
Eigen::MatrixXcd boundary_gram(const Basis& basis, const BoundaryArc& arc);

struct FamilyMember {
  std::string label;
  WaveField datum;
};

/// Families: "eigen:A" (every psi with alpha <= A), "whisper:n1,n2,..."
/// (psi_{n,1}), "beats:A" (normalized sums of spectrally adjacent modes with
/// alpha <= A), "coherent:x,y,px,py,h" (coherent state, basis up to
/// (|p| + 6 sqrt(h / 2)) / h + 10).
struct FamilySpec {
  std::string kind;
  std::vector<double> params;

  static FamilySpec parse(const std::string& text);
  std::string str() const;
  /// Cutoff of the basis needed to represent the family.
  double alpha_cut() const;
};

std::vector<FamilyMember> build_family(const FamilySpec& spec, BasisPtr basis);

struct ReportRow {
  std::string datum;
  std::string region;
  double quotient = 0.0;
};

struct ObservabilityReport {
  std::string family;
  std::string potential;
  double T = 0.0;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> minima;  // per region

  double min_quotient() const;
};

ObservabilityReport sweep(const FamilySpec& family, const std::vector<Region>& regions, double T,
                          const PotentialSpec& V, const HamiltonianOptions& hopt = {},
                          const ObserveOptions& opt = {});

}  // namespace diskq
