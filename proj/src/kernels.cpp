#include "diskq/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "diskq/bessel.hpp"

namespace diskq {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace kernels {

namespace {

constexpr double gauss_cutoff = 40.0;  // exp(-40) ~ 4e-18 relative

bool par(Exec e) { return e == Exec::parallel; }

// e^{-i 2 pi k / n} for k = 0..n-1.
std::vector<cplx> twiddles(int n) {
  std::vector<cplx> t(n);
  for (int k = 0; k < n; ++k) {
    const double a = two_pi * k / n;
    t[k] = {std::cos(a), -std::sin(a)};
  }
  return t;
}

}  // namespace

Eigen::MatrixXd radial_table(std::span<const Eigenmode> modes, std::span<const double> r, Exec exec) {
  const int K = static_cast<int>(modes.size());
  const int Q = static_cast<int>(r.size());
  Eigen::MatrixXd t(K, Q);
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int i = 0; i < K; ++i) {
    const auto& m = modes[i];
    for (int q = 0; q < Q; ++q) t(i, q) = bessel_j(m.n, m.zero * r[q]) / m.l2norm;
  }
  return t;
}

Eigen::MatrixXcd angular_coefficients(const Eigen::MatrixXd& v, int d_max, Exec exec) {
  const int Q = static_cast<int>(v.rows());
  const int L = static_cast<int>(v.cols());
  const auto tw = twiddles(L);
  Eigen::MatrixXcd out(Q, 2 * d_max + 1);
#pragma omp parallel for schedule(static) if (par(exec))
  for (int q = 0; q < Q; ++q) {
    for (int d = -d_max; d <= d_max; ++d) {
      cplx acc = 0.0;
      const long long step = ((d % L) + L) % L;
      long long idx = 0;
      for (int l = 0; l < L; ++l) {
        acc += v(q, l) * tw[idx];
        idx += step;
        if (idx >= L) idx -= L;
      }
      out(q, d + d_max) = acc / static_cast<double>(L);
    }
  }
  return out;
}

Eigen::MatrixXcd potential_matrix(const Eigen::MatrixXd& table, std::span<const int> angular,
                                  const QuadratureRule& r_rule, const Eigen::MatrixXcd& vhat, int d_max,
                                  bool radial_only, Exec exec) {
  const int K = static_cast<int>(table.rows());
  const int Q = static_cast<int>(table.cols());
  std::vector<double> rw(Q);
  for (int q = 0; q < Q; ++q) rw[q] = two_pi * r_rule.weights[q] * r_rule.nodes[q];
  if (!radial_only && K > 0) {
    const auto [lo, hi] = std::minmax_element(angular.begin(), angular.end());
    if (*hi - *lo > d_max) throw OutOfRange("potential_matrix: angular difference exceeds d_max");
  }
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(K, K);
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int i = 0; i < K; ++i) {
    for (int j = i; j < K; ++j) {
      const int d = angular[i] - angular[j];
      if (radial_only && d != 0) continue;
      cplx acc = 0.0;
      for (int q = 0; q < Q; ++q) acc += (rw[q] * table(i, q) * table(j, q)) * vhat(q, d + d_max);
      M(i, j) = acc;
    }
  }
  for (int i = 0; i < K; ++i) {
    M(i, i) = M(i, i).real();
    for (int j = i + 1; j < K; ++j) M(j, i) = std::conj(M(i, j));
  }
  return M;
}

Eigen::MatrixXcd potential_matrix_reference(const Eigen::MatrixXd& table, std::span<const int> angular,
                                            const QuadratureRule& r_rule, const QuadratureRule& u_rule,
                                            const Eigen::MatrixXd& v) {
  const int K = static_cast<int>(table.rows());
  Eigen::MatrixXcd M(K, K);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const double d = angular[i] - angular[j];
      cplx acc = 0.0;
      for (std::size_t q = 0; q < r_rule.size(); ++q) {
        for (std::size_t l = 0; l < u_rule.size(); ++l) {
          const double u = u_rule.nodes[l];
          acc += r_rule.weights[q] * u_rule.weights[l] * r_rule.nodes[q] * table(i, q) * table(j, q) *
                 v(q, l) * std::polar(1.0, -d * u);
        }
      }
      M(i, j) = acc;
    }
  }
  return M;
}

std::vector<cplx> coherent_overlaps(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                    std::span<const double> ys, double dA, const PhaseAxes& axes, double h,
                                    Exec exec) {
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  const int na = static_cast<int>(axes.x0.size());
  const int nb = static_cast<int>(axes.y0.size());
  const int nc = static_cast<int>(axes.px.size());
  const int nd = static_cast<int>(axes.py.size());
  const double prefactor = dA / std::sqrt(pi * h);

  // Stage 1: contract x. A[(a * nc + c) * ny + j].
  std::vector<cplx> A(static_cast<std::size_t>(na) * nc * ny, cplx(0.0));
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int ac = 0; ac < na * nc; ++ac) {
    const int a = ac / nc;
    const int c = ac % nc;
    cplx* row = &A[static_cast<std::size_t>(ac) * ny];
    for (int i = 0; i < nx; ++i) {
      const double w = xs[i] - axes.x0[a];
      const double g = w * w / (2.0 * h);
      if (g > gauss_cutoff) continue;
      const cplx k = std::exp(-g) * std::polar(1.0, -axes.px[c] * w / h);
      for (int j = 0; j < ny; ++j) row[j] += k * f(i, j);
    }
  }

  // Stage 2: contract y.
  std::vector<cplx> out(axes.size());
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int bd = 0; bd < nb * nd; ++bd) {
    const int b = bd / nd;
    const int d = bd % nd;
    std::vector<cplx> ky(ny, cplx(0.0));
    int lo = ny;
    int hi = -1;
    for (int j = 0; j < ny; ++j) {
      const double w = ys[j] - axes.y0[b];
      const double g = w * w / (2.0 * h);
      if (g > gauss_cutoff) continue;
      ky[j] = std::exp(-g) * std::polar(1.0, -axes.py[d] * w / h);
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
    for (int a = 0; a < na; ++a) {
      for (int c = 0; c < nc; ++c) {
        const cplx* row = &A[(static_cast<std::size_t>(a) * nc + c) * ny];
        cplx acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += ky[j] * row[j];
        out[axes.index(a, b, c, d)] = prefactor * acc;
      }
    }
  }
  return out;
}

std::vector<cplx> coherent_overlaps_reference(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                              std::span<const double> ys, double dA, const PhaseAxes& axes,
                                              double h) {
  std::vector<cplx> out(axes.size());
  const double prefactor = dA / std::sqrt(pi * h);
  for (std::size_t a = 0; a < axes.x0.size(); ++a)
    for (std::size_t b = 0; b < axes.y0.size(); ++b)
      for (std::size_t c = 0; c < axes.px.size(); ++c)
        for (std::size_t d = 0; d < axes.py.size(); ++d) {
          cplx acc = 0.0;
          for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < ys.size(); ++j) {
              const double wx = xs[i] - axes.x0[a];
              const double wy = ys[j] - axes.y0[b];
              const double phase = -(axes.px[c] * wx + axes.py[d] * wy) / h;
              acc += std::exp(-(wx * wx + wy * wy) / (2.0 * h)) * std::polar(1.0, phase) * f(i, j);
            }
          out[axes.index(a, b, c, d)] = prefactor * acc;
        }
  return out;
}

Eigen::MatrixXcd polar_fourier(const Eigen::MatrixXcd& f, std::span<const double> xs, std::span<const double> ys,
                               double dA, std::span<const double> energies, std::span<const double> thetas,
                               Exec exec) {
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  const int ne = static_cast<int>(energies.size());
  const int nt = static_cast<int>(thetas.size());
  Eigen::MatrixXcd out(ne, nt);
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int jl = 0; jl < ne * nt; ++jl) {
    const int j = jl / nt;
    const int l = jl % nt;
    const double kx = -energies[j] * std::sin(thetas[l]);
    const double ky = energies[j] * std::cos(thetas[l]);
    std::vector<cplx> ey(ny);
    for (int b = 0; b < ny; ++b) ey[b] = std::polar(1.0, -ky * ys[b]);
    cplx acc = 0.0;
    for (int a = 0; a < nx; ++a) {
      cplx row = 0.0;
      for (int b = 0; b < ny; ++b) row += ey[b] * f(a, b);
      acc += std::polar(1.0, -kx * xs[a]) * row;
    }
    out(j, l) = dA * acc;
  }
  return out;
}

Eigen::MatrixXcd polar_fourier_reference(const Eigen::MatrixXcd& f, std::span<const double> xs,
                                         std::span<const double> ys, double dA,
                                         std::span<const double> energies, std::span<const double> thetas) {
  Eigen::MatrixXcd out(energies.size(), thetas.size());
  for (std::size_t j = 0; j < energies.size(); ++j)
    for (std::size_t l = 0; l < thetas.size(); ++l) {
      const Vec2 xi{-energies[j] * std::sin(thetas[l]), energies[j] * std::cos(thetas[l])};
      cplx acc = 0.0;
      for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = 0; b < ys.size(); ++b)
          acc += std::polar(1.0, -(xi.x * xs[a] + xi.y * ys[b])) * f(a, b);
      out(j, l) = dA * acc;
    }
  return out;
}

std::vector<cplx> sample_points(std::span<const Eigenmode> modes, const Eigen::VectorXcd& coeffs,
                                std::span<const Vec2> points, Exec exec) {
  const int P = static_cast<int>(points.size());
  std::vector<cplx> out(P, cplx(0.0));
#pragma omp parallel for schedule(dynamic) if (par(exec))
  for (int p = 0; p < P; ++p) {
    const double r = std::min(1.0, norm(points[p]));
    const double u = std::atan2(points[p].y, points[p].x);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (coeffs[i] == cplx(0.0)) continue;
      const auto& m = modes[i];
      const double radial = bessel_j(m.n, m.zero * r) / m.l2norm;
      acc += coeffs[i] * radial * std::polar(1.0, m.angular() * u);
    }
    out[p] = acc;
  }
  return out;
}

}  // namespace kernels
}  // namespace diskq
