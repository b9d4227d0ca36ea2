#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "diskq/observe.hpp"
#include "support.hpp"

using namespace diskq;
using testing::Rng;

namespace {

HamiltonianOptions light() {
  HamiltonianOptions o;
  o.radial_nodes = 96;
  o.angular_nodes = 128;
  return o;
}

WaveField random_field(BasisPtr basis, Rng& rng) {
  WaveField u = WaveField::zero(basis);
  for (Eigen::Index i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = rng.complex_normal();
  return u;
}

// H^1-type datum: coefficients decaying like alpha^{-2} times Gaussian noise.
WaveField random_h1_field(BasisPtr basis, Rng& rng) {
  WaveField u = WaveField::zero(basis);
  for (std::size_t i = 0; i < basis->size(); ++i)
    u.coeffs[static_cast<Eigen::Index>(i)] = rng.complex_normal() / (*basis)[i].eigenvalue;
  return u;
}

}  // namespace

TEST_CASE("regions: parsing, printing and validation") {
  const auto a = Region::parse("r>0.8");
  CHECK(a.r_lo == 0.8);
  CHECK(a.r_hi == 1.0);
  CHECK(a.touches_boundary());
  CHECK(a.full_circle());
  const auto b = Region::parse("0.2<r<0.6;u=0.5:1.25");
  CHECK(b.r_lo == 0.2);
  CHECK(b.r_hi == 0.6);
  CHECK(b.u_lo == 0.5);
  CHECK(b.u_len == 1.25);
  CHECK_FALSE(b.touches_boundary());
  CHECK(Region::parse(b.str()).u_len == b.u_len);
  CHECK(Region::parse("disk").str() == "disk");
  CHECK(Region::parse("r<0.5").str() == "r<0.5");
  CHECK_THROWS_AS(Region::parse("r>1.5"), InvalidArgument);
  CHECK_THROWS_AS(Region::parse("square"), InvalidArgument);
  CHECK_THROWS_AS(Region::parse("r<0.5;v=1"), InvalidArgument);
  CHECK_THROWS_AS(FamilySpec::parse("eigen"), InvalidArgument);
  CHECK_THROWS_AS(FamilySpec::parse("whisper:1.5"), InvalidArgument);
  CHECK(FamilySpec::parse("whisper:10,20").params.size() == 2);
}

TEST_CASE("interior quotient: full disk, range, monotonicity and scaling") {
  Rng rng(51);
  const auto b = Basis::up_to(14.0);
  const Propagator P(assemble_hamiltonian(PotentialSpec::gaussian_bump({0.2, -0.3}, 0.25, 4.0), b, light()));
  const auto u = random_field(b, rng);
  CHECK(interior_quotient(u, P, Region::annulus(0.0, 1.0), 1.3) == doctest::Approx(1.0).epsilon(1e-8));

  const double q_small = interior_quotient(u, P, Region::sector(0.5, 0.9, 1.0, 1.5), 1.0);
  const double q_mid = interior_quotient(u, P, Region::sector(0.4, 0.95, 0.8, 2.0), 1.0);
  const double q_big = interior_quotient(u, P, Region::annulus(0.3, 1.0), 1.0);
  CHECK(q_small >= 0.0);
  CHECK(q_small <= q_mid);
  CHECK(q_mid <= q_big);
  CHECK(q_big <= 1.0);

  WaveField u2 = u;
  u2.coeffs *= cplx(-3.0, 2.0);
  CHECK(interior_quotient(u2, P, Region::sector(0.5, 0.9, 1.0, 1.5), 1.0) == doctest::Approx(q_small).epsilon(1e-12));
  CHECK_THROWS_AS(interior_quotient(WaveField::zero(b), P, Region::annulus(0.0, 1.0), 1.0), ZeroDatum);
}

TEST_CASE("interior quotient: spectral time integral against Simpson snapshots") {
  Rng rng(52);
  const auto b = Basis::up_to(9.0);
  const Propagator P(assemble_hamiltonian(PotentialSpec::x_linear(1.5), b, light()));
  const auto u = random_field(b, rng);
  ObserveOptions simpson;
  simpson.time = TimeQuadrature::simpson;
  const auto region = Region::sector(0.3, 0.8, 2.0, 2.5);
  const double s = interior_quotient(u, P, region, 0.7);
  CHECK(interior_quotient(u, P, region, 0.7, simpson) == doctest::Approx(s).epsilon(1e-8));

  // A direct snapshot check at T -> 0: the quotient tends to the mass of u0 in the region.
  const auto G = region_gram(*b, region);
  const double m0 = u.coeffs.dot(G * u.coeffs).real() / u.coeffs.squaredNorm();
  CHECK(interior_quotient(u, P, region, 1e-7) == doctest::Approx(m0).epsilon(1e-6));

  ObserveOptions starved = simpson;
  starved.min_snapshots = 4;
  starved.max_snapshots = 4;
  CHECK_THROWS_AS(interior_quotient(u, P, region, 5.0, starved), QuadratureUnderResolved);
}

TEST_CASE("interior quotient: sector identity and rotation equivariance") {
  const auto b = Basis::up_to(16.0);
  const Propagator P0(assemble_hamiltonian(PotentialSpec::zero(), b, light()));
  for (auto [n, k] : {std::pair{3, 2}, {0, 3}, {7, 1}}) {
    const auto psi = WaveField::mode(b, n, k, 1);
    const double full = interior_quotient(psi, P0, Region::annulus(0.2, 0.9), 2.0);
    for (double len : {0.4, 1.1, 3.0}) {
      const double part = interior_quotient(psi, P0, Region::sector(0.2, 0.9, 0.7, len), 2.0);
      CHECK(std::abs(part - len / two_pi * full) < 1e-10);
    }
  }

  Rng rng(53);
  const Propagator R(assemble_hamiltonian(PotentialSpec::radial_polynomial({0.0, 1.0, -2.0, 3.0}), b, light()));
  const auto u = random_field(b, rng);
  const auto region = Region::sector(0.1, 0.7, 0.4, 1.9);
  const double beta = 1.234;
  const double a = interior_quotient(u, R, region, 1.5);
  const double c = interior_quotient(rotate(u, beta), R, region.rotated(beta), 1.5);
  CHECK(std::abs(a - c) < 1e-8);
}

TEST_CASE("interior quotient: non-boundary region misses a whispering mode") {
  const auto b = Basis::from_indices(std::vector<ModeIndex>{{60, 1}});
  const Propagator P(assemble_hamiltonian(PotentialSpec::zero(), b, light()));
  const double q = interior_quotient(WaveField::mode(b, 60, 1, 1), P, Region::annulus(0.0, 0.5), 1.0);
  MESSAGE("psi_{60,1} quotient on r < 0.5: " << q);
  CHECK(q < 1e-3);
  CHECK(q >= 0.0);

  // Independent value: the same mass by Boost quadrature of J_60^2 r.
  const auto& m = (*b)[0];
  double acc = 0.0;
  const int N = 4000;
  for (int i = 0; i < N; ++i) {
    const double r = 0.5 * (i + 0.5) / N;
    const double j = boost::math::cyl_bessel_j(60, m.zero * r);
    acc += j * j * r * (0.5 / N);
  }
  const double norm2 = pi * std::pow(boost::math::cyl_bessel_j(61, m.zero), 2);
  CHECK(q == doctest::Approx(two_pi * acc / norm2).epsilon(1e-6));
}

TEST_CASE("boundary quotient: closed form, arcs and scaling") {
  const double T = 1.0;
  const auto b = Basis::up_to(40.0);
  const Propagator P0(assemble_hamiltonian(PotentialSpec::zero(), b, light()));
  // For a normalized eigenmode the trace has modulus alpha / sqrt(pi), so the
  // full-circle quotient is 2 alpha^2 T / (1 + alpha^2).
  for (auto [n, k] : {std::pair{0, 1}, {4, 2}, {11, 3}}) {
    const auto psi = WaveField::mode(b, n, k, -1);
    const double a = (*b)[*b->index_of(n, k, -1)].zero;
    const double closed = 2.0 * a * a * T / (1.0 + a * a);
    CHECK(std::abs(boundary_quotient(psi, P0, BoundaryArc{}, T) - closed) < 1e-8);
  }

  // Arc of length pi/8 over the family alpha <= 40: every eigenmode trace is
  // uniform in u, so the minimum is attained by psi_{0,1}.
  const double len = pi / 8;
  double lowest = 1e300;
  for (std::size_t i = 0; i < b->size(); ++i) {
    const auto& m = (*b)[i];
    lowest = std::min(lowest, boundary_quotient(WaveField::mode(b, m.n, m.k, m.sign), P0, BoundaryArc{2.0, len}, T));
  }
  const double a01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  CHECK(lowest == doctest::Approx(len / pi * a01 * a01 / (1 + a01 * a01) * T).epsilon(1e-10));
  CHECK(lowest == doctest::Approx(0.10657208121923627 * T).epsilon(1e-10));

  Rng rng(54);
  const auto small = Basis::up_to(12.0);
  const Propagator P(assemble_hamiltonian(PotentialSpec::x_linear(2.0), small, light()));
  const auto u = random_h1_field(small, rng);
  WaveField u2 = u;
  u2.coeffs *= 2.0;
  const BoundaryArc arc{0.3, 2.0};
  CHECK(boundary_quotient(u2, P, arc, T) == doctest::Approx(boundary_quotient(u, P, arc, T)).epsilon(1e-12));
  CHECK(boundary_quotient(u, P, arc, T) >= 0.0);

  // Time integral against Simpson snapshots of the sampled Neumann trace.
  ObserveOptions simpson;
  simpson.time = TimeQuadrature::simpson;
  CHECK(boundary_quotient(u, P, arc, T, simpson) == doctest::Approx(boundary_quotient(u, P, arc, T)).epsilon(1e-8));
  CHECK_THROWS_AS(boundary_quotient(WaveField::zero(small), P, arc, T), ZeroDatum);
}

TEST_CASE("boundary quotient: one constant bounds a random H1 ensemble") {
  Rng rng(55);
  const auto b = Basis::up_to(20.0);
  const Propagator P(assemble_hamiltonian(PotentialSpec::gaussian_bump({0.1, 0.2}, 0.3, 5.0), b, light()));
  std::vector<double> q;
  for (int i = 0; i < 40; ++i) q.push_back(boundary_quotient(random_h1_field(b, rng), P, BoundaryArc{}, 1.0));
  // Fit on the first half, test on the second.
  const double C = *std::max_element(q.begin(), q.begin() + 20);
  const double worst = *std::max_element(q.begin() + 20, q.end());
  MESSAGE("fitted C = " << C << ", worst held-out quotient = " << worst);
  CHECK(worst <= 2.0 * C);
}

TEST_CASE("sweeps: empty, whispering trend, baseline and coherent delocalization") {
  const auto empty = sweep(FamilySpec::parse("eigen:10"), {}, 1.0, PotentialSpec::zero());
  CHECK(empty.rows.empty());

  const auto w = sweep(FamilySpec::parse("whisper:10,20,40,60"), {Region::annulus(0.0, 0.5)}, 1.0,
                       PotentialSpec::zero(), light());
  REQUIRE(w.rows.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(w.rows[i].quotient < w.rows[i - 1].quotient);

  const auto e = sweep(FamilySpec::parse("eigen:40"), {Region::annulus(0.8, 1.0)}, 1.0, PotentialSpec::zero(), light());
  CHECK(e.min_quotient() > 0.0);
  CHECK(e.min_quotient() == doctest::Approx(0.029377156268816762).epsilon(0.01));

  const auto c = sweep(FamilySpec::parse("coherent:-0.5,0,0,1,0.01"), {Region::annulus(0.9, 1.0)}, 5.0,
                       PotentialSpec::zero(), light());
  MESSAGE("triangle-orbit coherent state quotient on r > 0.9: " << c.min_quotient());
  CHECK(c.min_quotient() > 0.01);
}
