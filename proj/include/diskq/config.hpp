#pragma once

// Run configuration shared by the command-line front end and the commands.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diskq/common.hpp"
#include "diskq/evolve.hpp"
#include "diskq/geometry.hpp"
#include "diskq/observe.hpp"

namespace diskq {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numeric self-check failed (exit code 3).
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::string out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 20240601;
  Tolerances tol;

  // eigen
  int n = 0;
  int k = 1;
  int sign = 1;

  // basis and Hamiltonian
  double alpha_cut = 30.0;
  std::string potential = "zero";
  int radial_nodes = 256;
  int angular_nodes = 512;
  bool check_convergence = true;
  double convergence_tol = 1e-9;
  std::string datum = "mode:0,1,1";

  // billiard and Floquet
  std::string alpha0 = "1/6";
  double tau = 6.0;
  double theta = 0.0;
  int samples = 200;
  double omega = 0.0;
  int cutoff = 16;
  int theta_points = 256;
  double t = 1.0;

  // phase space
  double h = 0.02;
  int z_points = 30;
  int xi_points = 44;
  double xi_min = -1.5;
  double xi_max = 1.5;
  std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
  int q_max = 50;
  double class_tol = 1e-9;

  // observability
  std::string family = "eigen:40";
  std::vector<std::string> regions = {"r>0.8"};
  std::vector<std::string> arcs;
  double T = 1.0;
  std::string time_quadrature = "spectral";
};

/// "zero" | "constant:c" | "radial_poly:c0,c1,..." | "x_linear:s" |
/// "gaussian:cx,cy,width,amplitude".
PotentialSpec parse_potential(const std::string& text);

/// "mode:n,k,sign" | "coherent:x,y,px,py,h".
WaveField parse_datum(const std::string& text, BasisPtr basis);

/// Cutoff needed to represent a datum descriptor, 0 if none.
double datum_alpha_cut(const std::string& text);

/// "lo:len" in radians.
BoundaryArc parse_arc(const std::string& text);

/// Throws ConfigError on the first invalid field.
void validate(const RunConfig& cfg);

/// Every configuration field as key / value text, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

}  // namespace diskq
