#include "diskq/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diskq/common.hpp"

namespace diskq {

namespace {

void check_args(int n, double x, const BesselLimits& limits) {
  if (n < 0 || n > limits.n_max)
    throw OutOfRange("bessel_j: order " + std::to_string(n) + " outside [0, " +
                     std::to_string(limits.n_max) + "]");
  if (!(x >= 0.0) || x > limits.x_max)
    throw OutOfRange("bessel_j: argument " + std::to_string(x) + " outside [0, x_max]");
}

// Ascending series; used only where (x/2)^2 <= n + 1 so the terms decrease
// from the first one and no cancellation occurs.
double series(int n, double x) {
  const double half = 0.5 * x;
  const double log_first = n * std::log(half) - std::lgamma(n + 1.0);
  double term = std::exp(log_first);
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (n + k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

bool use_series(int n, double x) { return 0.25 * x * x <= n + 1.0; }

// Miller's backward recurrence normalized with J_0 + 2 sum J_{2k} = 1.
BesselPair miller(int n, double x) {
  const double m = std::max(static_cast<double>(n + 1), x);
  int start = static_cast<int>(m + 14.0 * std::cbrt(m) + 30.0);
  start += start % 2;
  constexpr double big = 1e250;
  constexpr double small = 1e-250;
  double next = 0.0;  // J_{k+1}
  double cur = 1.0;   // J_k, with k == start
  double sum = 0.0;
  double jn = 0.0;
  double jn1 = 0.0;
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 1; --k) {
    const double prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    const int idx = k - 1;
    if (idx == n + 1) jn1 = cur;
    if (idx == n) jn = cur;
    if (idx > 0 && idx % 2 == 0) sum += 2.0 * cur;
    if (idx == 0) sum += cur;
    if (std::abs(cur) > big) {
      cur *= small;
      next *= small;
      sum *= small;
      jn *= small;
      jn1 *= small;
    }
  }
  return {jn / sum, jn1 / sum};
}

// Large x, moderate order: J_0 and J_1 from Hankel's asymptotic series, then
// forward recurrence (stable while k < x). Miller's recurrence over ~x steps
// drifts in phase by about x * eps, which matters once x reaches thousands.
bool use_hankel(int n, double x) { return x >= 30.0 && x >= 1.5 * (n + 1); }

void hankel_pq(double mu, double x, double& p, double& q) {
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  const double e8x = 8.0 * x;
  for (int k = 1; k < 120; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * e8x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    if (k % 2 == 1) {
      q += (k % 4 == 1 ? 1.0 : -1.0) * term;
    } else {
      p += (k % 4 == 2 ? -1.0 : 1.0) * term;
    }
    if (std::abs(term) < 1e-18) break;
  }
}

BesselPair hankel(int n, double x) {
  // Phases x - pi/4 and x - 3pi/4 are expanded so that only sin(x), cos(x)
  // see the (exactly reduced) large argument.
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double r = std::sqrt(1.0 / (pi * x));  // sqrt(2/(pi x)) / sqrt(2)
  double p0, q0, p1, q1;
  hankel_pq(0.0, x, p0, q0);
  hankel_pq(4.0, x, p1, q1);
  double jm = r * (p0 * (c + s) - q0 * (s - c));  // J_0
  double j = r * (p1 * (s - c) + q1 * (s + c));   // J_1
  if (n == 0) return {jm, j};
  for (int k = 1; k <= n; ++k) {
    const double next = (2.0 * k / x) * j - jm;
    jm = j;
    j = next;
  }
  return {jm, j};
}

BesselPair evaluate_pair(int n, double x) {
  if (x == 0.0) return {n == 0 ? 1.0 : 0.0, 0.0};
  if (use_series(n + 1, x) && use_series(n, x)) return {series(n, x), series(n + 1, x)};
  if (use_hankel(n, x)) return hankel(n, x);
  return miller(n, x);
}

// Safeguarded Newton inside a sign-change bracket [a, b].
double refine_zero(int n, double a, double b) {
  double fa = evaluate_pair(n, a).jn;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const auto p = evaluate_pair(n, x);
    const double f = p.jn;
    if (f == 0.0) return x;
    if ((f > 0.0) == (fa > 0.0)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    const double df = (n / x) * p.jn - p.jn1;
    double candidate = (df != 0.0) ? x - f / df : 0.5 * (a + b);
    if (!(candidate > a && candidate < b)) candidate = 0.5 * (a + b);
    const double step = std::abs(candidate - x);
    x = candidate;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * x)
      break;
  }
  return x;
}

}  // namespace

double bessel_j(int n, double x, const BesselLimits& limits) {
  check_args(n, x, limits);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (use_series(n, x)) return series(n, x);
  return evaluate_pair(n, x).jn;
}

BesselPair bessel_j_pair(int n, double x, const BesselLimits& limits) {
  check_args(n, x, limits);
  return evaluate_pair(n, x);
}

double bessel_j_derivative(int n, double x, const BesselLimits& limits) {
  check_args(n, x, limits);
  if (x == 0.0) return n == 1 ? 0.5 : 0.0;
  const auto p = evaluate_pair(n, x);
  return (n / x) * p.jn - p.jn1;
}

namespace {

// Scans J_n for sign changes until either k_count zeros are found or the scan
// passes x_cut.
std::vector<double> scan_zeros(int n, int k_count, double x_cut, const BesselLimits& limits) {
  std::vector<double> zeros;
  zeros.reserve(std::min(k_count, 4096));
  // No zero lies in (0, n]; consecutive zeros are more than 3 apart, so a unit
  // scan step cannot skip a sign change.
  double a = n == 0 ? 1.0 : static_cast<double>(n);
  double fa = evaluate_pair(n, a).jn;
  constexpr double step = 1.0;
  while (static_cast<int>(zeros.size()) < k_count) {
    const double b = a + step;
    if (a > x_cut) break;
    if (b > limits.x_max) throw OutOfRange("bessel_zero: zero exceeds x_max");
    const double fb = evaluate_pair(n, b).jn;
    if (fb == 0.0) {
      zeros.push_back(b);
      a = b + 1e-9;
      fa = evaluate_pair(n, a).jn;
      continue;
    }
    if ((fa > 0.0) != (fb > 0.0)) zeros.push_back(refine_zero(n, a, b));
    a = b;
    fa = fb;
  }
  while (!zeros.empty() && zeros.back() > x_cut) zeros.pop_back();
  return zeros;
}

}  // namespace

std::vector<double> bessel_zeros(int n, int k_count, const BesselLimits& limits) {
  if (n < 0 || n > limits.n_max) throw OutOfRange("bessel_zero: order out of range");
  if (k_count < 0 || k_count > limits.k_max) throw OutOfRange("bessel_zero: index out of range");
  return scan_zeros(n, k_count, std::numeric_limits<double>::infinity(), limits);
}

std::vector<double> bessel_zeros_below(int n, double x_cut, const BesselLimits& limits) {
  if (n < 0 || n > limits.n_max) throw OutOfRange("bessel_zero: order out of range");
  return scan_zeros(n, std::numeric_limits<int>::max(), x_cut, limits);
}

double bessel_zero(int n, int k, const BesselLimits& limits) {
  if (k < 1) throw OutOfRange("bessel_zero: k must be >= 1");
  return bessel_zeros(n, k, limits).back();
}

ZeroTable::ZeroTable(int n_max, int k_max, const BesselLimits& limits)
    : n_max_(n_max), k_max_(k_max), zeros_(n_max + 1) {
  if (n_max < 0 || n_max > limits.n_max || k_max < 1 || k_max > limits.k_max)
    throw OutOfRange("ZeroTable: table size out of range");
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n <= n_max; ++n) zeros_[n] = bessel_zeros(n, k_max, limits);
}

double ZeroTable::operator()(int n, int k) const {
  if (n < 0 || n > n_max_ || k < 1 || k > k_max_) throw OutOfRange("ZeroTable: index out of range");
  return zeros_[n][k - 1];
}

const std::vector<double>& ZeroTable::zeros_of(int n) const {
  if (n < 0 || n > n_max_) throw OutOfRange("ZeroTable: order out of range");
  return zeros_[n];
}

}  // namespace diskq
