#pragma once

// Dirichlet eigenmodes psi^{+-}_{n,k}(r e^{iu}) = J_n(alpha_{n,k} r) e^{+-i n u}
// of the unit disk and their stationary densities.

#include <span>
#include <vector>

#include "diskq/bessel.hpp"

namespace diskq {

struct Eigenmode {
  int n = 0;
  int k = 1;
  int sign = 1;
  double zero = 0.0;        // alpha_{n,k}
  double eigenvalue = 0.0;  // alpha^2, eigenvalue of -Delta_D
  double l2norm = 0.0;      // ||psi|| of the unnormalized mode, sqrt(pi) |J_{n+1}(alpha)|
  double gamma = 0.0;       // caustic radius n / alpha

  /// Signed angular number sign * n, the eigenvalue of -i d/du.
  int angular() const { return sign * n; }
};

Eigenmode eigenmode(int n, int k, int sign, const BesselLimits& limits = {});
/// Same as eigenmode() with the zero supplied (e.g. from a ZeroTable).
Eigenmode eigenmode_from_zero(int n, int k, int sign, double zero, const BesselLimits& limits = {});

/// Radial value of the L2-normalized mode: J_n(alpha r) / ||psi||.
double normalized_radial(const Eigenmode& m, double r);

/// rho(r) = |J_n(alpha r)|^2 / ||psi||^2, so that int rho 2 pi r dr = 1.
std::vector<double> radial_density(const Eigenmode& m, std::span<const double> r_grid);

/// Fraction of the mode's L2 mass in the annulus r_lo < r < r_hi.
double annulus_mass(const Eigenmode& m, double r_lo, double r_hi);

/// Closed-form weak limit of the radial density for caustic radius gamma.
double caustic_limit_density(double gamma, double r);

struct LimitDensityOptions {
  double caustic_window = 0.02;
  double panel_width = 0.005;
  int nodes_per_panel = 16;
};

/// int_0^1 |rho_mode - rho_limit| 2 pi r dr with the caustic window removed.
double limit_density_error(const Eigenmode& m, const LimitDensityOptions& opt = {});

/// int_0^1 |F_mode(r) - F_limit(r)| dr with F the radial cumulative mass;
/// a metric for weak convergence of the densities.
double limit_cumulative_error(const Eigenmode& m, const LimitDensityOptions& opt = {});

/// min over j, k <= K of |alpha_{n,j} - alpha_{m,k}|.
double siegel_separation(int n, int m, int K, const BesselLimits& limits = {});
double siegel_separation(const ZeroTable& table, int n, int m, int K);

}  // namespace diskq
