#pragma once

// Bessel functions of the first kind of integer order and their positive zeros.

#include <vector>

namespace diskq {

struct BesselLimits {
  int n_max = 512;
  double x_max = 1e4;
  int k_max = 1000;
};

/// J_n(x) for 0 <= n <= n_max and 0 <= x <= x_max.
double bessel_j(int n, double x, const BesselLimits& limits = {});

/// J_n(x) and J_{n+1}(x) from a single recurrence sweep.
struct BesselPair {
  double jn;
  double jn1;
};
BesselPair bessel_j_pair(int n, double x, const BesselLimits& limits = {});

/// J_n'(x) = (n / x) J_n(x) - J_{n+1}(x).
double bessel_j_derivative(int n, double x, const BesselLimits& limits = {});

/// k-th positive zero of J_n (k >= 1).
double bessel_zero(int n, int k, const BesselLimits& limits = {});

/// First k_count positive zeros of J_n, in increasing order.
std::vector<double> bessel_zeros(int n, int k_count, const BesselLimits& limits = {});

/// All positive zeros of J_n not exceeding x_cut.
std::vector<double> bessel_zeros_below(int n, double x_cut, const BesselLimits& limits = {});

/// Immutable table of zeros alpha_{n,k}, 0 <= n <= n_max, 1 <= k <= k_max.
class ZeroTable {
 public:
  ZeroTable(int n_max, int k_max, const BesselLimits& limits = {});

  double operator()(int n, int k) const;
  int n_max() const { return n_max_; }
  int k_max() const { return k_max_; }
  const std::vector<double>& zeros_of(int n) const;

 private:
  int n_max_;
  int k_max_;
  std::vector<std::vector<double>> zeros_;
};

}  // namespace diskq
