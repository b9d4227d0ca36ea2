#include <doctest.h>

#include <cmath>
#include <vector>

#include "diskq/evolve.hpp"
#include "diskq/kernels.hpp"
#include "diskq/phase.hpp"
#include "support.hpp"

using namespace diskq;
using testing::Rng;

namespace {

// Several threads even on a single core, so the parallel paths really split.
struct ThreadScope {
  int before = max_threads();
  explicit ThreadScope(int n) { set_threads(n); }
  ~ThreadScope() { set_threads(before); }
};

template <class M>
bool bit_equal(const M& a, const M& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

Eigen::MatrixXcd random_grid(Rng& rng, int n) {
  Eigen::MatrixXcd f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = rng.complex_normal();
  return f;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace

TEST_CASE("radial table and potential matrix: serial, parallel and reference") {
  const ThreadScope threads(4);
  const auto basis = Basis::up_to(14.0);
  const auto rule = gauss_legendre(48, 0.0, 1.0);
  const auto ur = periodic_trapezoid(64);
  const auto& modes = basis->modes();
  const auto Ts = kernels::radial_table(modes, rule.nodes, Exec::serial);
  const auto Tp = kernels::radial_table(modes, rule.nodes, Exec::parallel);
  CHECK(bit_equal(Ts, Tp));
  CHECK(Ts(3, 7) == normalized_radial(modes[3], rule.nodes[7]));

  Eigen::MatrixXd v(48, 64);
  for (int q = 0; q < 48; ++q)
    for (int l = 0; l < 64; ++l) {
      const double r = rule.nodes[q], u = ur.nodes[l];
      v(q, l) = std::exp(-r * r) * (1.0 + 0.3 * std::cos(u) - 0.2 * std::sin(3 * u)) + r * std::cos(2 * u);
    }
  const int d_max = 2 * basis->max_n();
  const auto vs = kernels::angular_coefficients(v, d_max, Exec::serial);
  const auto vp = kernels::angular_coefficients(v, d_max, Exec::parallel);
  CHECK(bit_equal(vs, vp));

  const auto& ang = basis->angular();
  const auto Ms = kernels::potential_matrix(Ts, ang, rule, vs, d_max, false, Exec::serial);
  const auto Mp = kernels::potential_matrix(Ts, ang, rule, vs, d_max, false, Exec::parallel);
  CHECK(bit_equal(Ms, Mp));
  const auto Mr = kernels::potential_matrix_reference(Ts, ang, rule, ur, v);
  CHECK((Ms - Mr).cwiseAbs().maxCoeff() < 1e-12);

  // Whole-assembly determinism across execution policies.
  HamiltonianOptions a, b;
  a.radial_nodes = b.radial_nodes = 64;
  a.angular_nodes = b.angular_nodes = 128;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  const auto V = PotentialSpec::gaussian_bump({0.2, 0.1}, 0.3, 2.0);
  CHECK(bit_equal(assemble_hamiltonian(V, basis, a).matrix, assemble_hamiltonian(V, basis, b).matrix));
}

TEST_CASE("coherent overlaps: serial, parallel and reference") {
  const ThreadScope threads(3);
  Rng rng(61);
  const int n = 41;
  const auto xs = linspace(-1.0, 1.0, n);
  const auto f = random_grid(rng, n);
  kernels::PhaseAxes axes;
  axes.x0 = linspace(-0.8, 0.8, 5);
  axes.y0 = linspace(-0.6, 0.7, 4);
  axes.px = linspace(-1.0, 1.0, 6);
  axes.py = linspace(-0.9, 1.1, 5);
  const double dA = (xs[1] - xs[0]) * (xs[1] - xs[0]);
  const auto s = kernels::coherent_overlaps(f, xs, xs, dA, axes, 0.05, Exec::serial);
  const auto p = kernels::coherent_overlaps(f, xs, xs, dA, axes, 0.05, Exec::parallel);
  const auto r = kernels::coherent_overlaps_reference(f, xs, xs, dA, axes, 0.05);
  REQUIRE(s.size() == axes.size());
  CHECK(s == p);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(s[i] - r[i]));
    scale = std::max(scale, std::abs(r[i]));
  }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("polar Fourier samples: serial, parallel and reference") {
  const ThreadScope threads(4);
  Rng rng(62);
  const int n = 33;
  const auto xs = linspace(-2.0, 2.0, n);
  const auto f = random_grid(rng, n);
  const double dA = (xs[1] - xs[0]) * (xs[1] - xs[0]);
  const auto energies = linspace(0.1, 6.0, 17);
  const auto thetas = linspace(0.0, 6.0, 23);
  const auto s = kernels::polar_fourier(f, xs, xs, dA, energies, thetas, Exec::serial);
  const auto p = kernels::polar_fourier(f, xs, xs, dA, energies, thetas, Exec::parallel);
  const auto r = kernels::polar_fourier_reference(f, xs, xs, dA, energies, thetas);
  CHECK(bit_equal(s, p));
  CHECK((s - r).cwiseAbs().maxCoeff() < 1e-12 * r.cwiseAbs().maxCoeff());
}

TEST_CASE("field sampling and derived quantities do not depend on the execution policy") {
  const ThreadScope threads(4);
  Rng rng(63);
  const auto basis = Basis::up_to(18.0);
  WaveField u = WaveField::zero(basis);
  for (Eigen::Index i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = rng.complex_normal();
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) pts.push_back(testing::random_point(rng, 1.0).z);
  CHECK(sample_points(u, pts, Exec::serial) == sample_points(u, pts, Exec::parallel));

  PolarGrid grid{linspace(0.0, 1.0, 21), linspace(0.0, 6.0, 31)};
  CHECK(bit_equal(sample_grid(u, grid, Exec::serial), sample_grid(u, grid, Exec::parallel)));

  u.coeffs /= u.coeffs.norm();
  HusimiGridSpec a, b;
  a.z_points = b.z_points = 21;
  a.xi_points = b.xi_points = 21;
  a.xi_min = b.xi_min = -1.0;
  a.xi_max = b.xi_max = 1.0;
  a.exec = Exec::serial;
  b.exec = Exec::parallel;
  CHECK(husimi(u, 0.05, a).values == husimi(u, 0.05, b).values);
}
