#pragma once

#include <span>
#include <vector>

namespace diskq {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss-Legendre on each of `panels` equal sub-intervals of [a, b].
QuadratureRule composite_gauss_legendre(int nodes_per_panel, int panels, double a, double b);

/// Composite GL on [a, b] with panels no wider than max_width.
QuadratureRule panelled_gauss_legendre(double a, double b, double max_width, int nodes_per_panel);

/// Periodic trapezoid rule on [a, a + 2 pi) with n nodes.
QuadratureRule periodic_trapezoid(int n, double a = 0.0);

/// Composite Simpson weights for n + 1 equispaced samples on [a, b]; n even.
std::vector<double> simpson_weights(int n, double a, double b);

}  // namespace diskq
