#include "diskq/quadrature.hpp"

#include <cmath>

#include "diskq/common.hpp"

namespace diskq {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule composite_gauss_legendre(int nodes_per_panel, int panels, double a, double b) {
  QuadratureRule rule;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const auto local = gauss_legendre(nodes_per_panel, a + p * width, a + (p + 1) * width);
    rule.nodes.insert(rule.nodes.end(), local.nodes.begin(), local.nodes.end());
    rule.weights.insert(rule.weights.end(), local.weights.begin(), local.weights.end());
  }
  return rule;
}

QuadratureRule panelled_gauss_legendre(double a, double b, double max_width, int nodes_per_panel) {
  if (b <= a) return {};
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
  return composite_gauss_legendre(nodes_per_panel, panels, a, b);
}

QuadratureRule periodic_trapezoid(int n, double a) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, two_pi / n);
  for (int j = 0; j < n; ++j) rule.nodes[j] = a + two_pi * j / n;
  return rule;
}

std::vector<double> simpson_weights(int n, double a, double b) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("simpson_weights: n must be even and >= 2");
  const double h = (b - a) / n;
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double c = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * h / 3.0;
  }
  return w;
}

}  // namespace diskq
