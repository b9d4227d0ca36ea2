#include "diskq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diskq/common.hpp"
#include "diskq/quadrature.hpp"

namespace diskq {

Eigenmode eigenmode_from_zero(int n, int k, int sign, double zero, const BesselLimits& limits) {
  if (sign != 1 && sign != -1) throw OutOfRange("eigenmode: sign must be +1 or -1");
  Eigenmode m;
  m.n = n;
  m.k = k;
  m.sign = sign;
  m.zero = zero;
  m.eigenvalue = zero * zero;
  m.l2norm = std::sqrt(pi) * std::abs(bessel_j(n + 1, zero, limits));
  m.gamma = n / zero;
  return m;
}

Eigenmode eigenmode(int n, int k, int sign, const BesselLimits& limits) {
  return eigenmode_from_zero(n, k, sign, bessel_zero(n, k, limits), limits);
}

double normalized_radial(const Eigenmode& m, double r) {
  return bessel_j(m.n, m.zero * r) / m.l2norm;
}

std::vector<double> radial_density(const Eigenmode& m, std::span<const double> r_grid) {
  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    const double v = normalized_radial(m, r);
    out.push_back(v * v);
  }
  return out;
}

double annulus_mass(const Eigenmode& m, double r_lo, double r_hi) {
  r_lo = std::clamp(r_lo, 0.0, 1.0);
  r_hi = std::clamp(r_hi, 0.0, 1.0);
  if (r_hi <= r_lo) return 0.0;
  const double width = std::min(0.05, 2.0 / m.zero);
  const auto rule = panelled_gauss_legendre(r_lo, r_hi, width, 16);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = normalized_radial(m, rule.nodes[i]);
    acc += rule.weights[i] * v * v * rule.nodes[i];
  }
  return two_pi * acc;
}

double caustic_limit_density(double gamma, double r) {
  if (r <= gamma) return 0.0;
  return 1.0 / (two_pi * std::sqrt(1.0 - gamma * gamma) * std::sqrt(r * r - gamma * gamma));
}

namespace {

void check_caustic(const Eigenmode& m) {
  if (m.gamma > 0.95) throw CausticTooClose("limit density: caustic radius above 0.95");
}

double limit_cdf(double gamma, double r) {
  if (r <= gamma) return 0.0;
  return std::sqrt(r * r - gamma * gamma) / std::sqrt(1.0 - gamma * gamma);
}

}  // namespace

double limit_density_error(const Eigenmode& m, const LimitDensityOptions& opt) {
  check_caustic(m);
  const double lo = std::max(0.0, m.gamma - opt.caustic_window);
  const double hi = std::min(1.0, m.gamma + opt.caustic_window);
  double acc = 0.0;
  auto integrate = [&](double a, double b) {
    const auto rule = panelled_gauss_legendre(a, b, opt.panel_width, opt.nodes_per_panel);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double r = rule.nodes[i];
      const double v = normalized_radial(m, r);
      acc += rule.weights[i] * std::abs(v * v - caustic_limit_density(m.gamma, r)) * two_pi * r;
    }
  };
  integrate(0.0, lo);
  integrate(hi, 1.0);
  return acc;
}

double limit_cumulative_error(const Eigenmode& m, const LimitDensityOptions& opt) {
  check_caustic(m);
  const auto panels = panelled_gauss_legendre(0.0, 1.0, opt.panel_width, opt.nodes_per_panel);
  const auto unit = gauss_legendre(opt.nodes_per_panel, 0.0, 1.0);
  auto mass_between = [&](double a, double b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < unit.size(); ++i) {
      const double r = a + (b - a) * unit.nodes[i];
      const double v = normalized_radial(m, r);
      acc += unit.weights[i] * v * v * r;
    }
    return two_pi * acc * (b - a);
  };
  const int per = opt.nodes_per_panel;
  const int count = static_cast<int>(panels.size()) / per;
  double cdf_start = 0.0;
  double error = 0.0;
  for (int p = 0; p < count; ++p) {
    const double a = static_cast<double>(p) / count;
    const double b = static_cast<double>(p + 1) / count;
    for (int i = 0; i < per; ++i) {
      const double r = panels.nodes[p * per + i];
      const double cdf = cdf_start + mass_between(a, r);
      error += panels.weights[p * per + i] * std::abs(cdf - limit_cdf(m.gamma, r));
    }
    cdf_start += mass_between(a, b);
  }
  return error;
}

double siegel_separation(const ZeroTable& table, int n, int m, int K) {
  if (n == m) throw SameOrder("siegel_separation: orders must differ");
  const auto& a = table.zeros_of(n);
  const auto& b = table.zeros_of(m);
  if (K > static_cast<int>(a.size()) || K > static_cast<int>(b.size()))
    throw OutOfRange("siegel_separation: K exceeds table size");
  double best = std::numeric_limits<double>::infinity();
  int i = 0;
  int j = 0;
  while (i < K && j < K) {
    best = std::min(best, std::abs(a[i] - b[j]));
    if (a[i] < b[j]) ++i;
    else ++j;
  }
  return best;
}

double siegel_separation(int n, int m, int K, const BesselLimits& limits) {
  if (n == m) throw SameOrder("siegel_separation: orders must differ");
  const auto a = bessel_zeros(n, K, limits);
  const auto b = bessel_zeros(m, K, limits);
  double best = std::numeric_limits<double>::infinity();
  for (double x : a)
    for (double y : b) best = std::min(best, std::abs(x - y));
  return best;
}

}  // namespace diskq
