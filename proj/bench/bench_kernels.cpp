// Serial vs OpenMP vs reference timings of the hot kernels.

#include <benchmark/benchmark.h>

#include <cmath>

#include "diskq/evolve.hpp"
#include "diskq/kernels.hpp"

using namespace diskq;

namespace {

struct MatrixSetup {
  BasisPtr basis;
  QuadratureRule r_rule;
  QuadratureRule u_rule;
  Eigen::MatrixXd table;
  Eigen::MatrixXd v;
  Eigen::MatrixXcd vhat;
  int d_max;

  explicit MatrixSetup(double alpha_cut, int nr = 96, int nu = 192) {
    basis = Basis::up_to(alpha_cut);
    r_rule = gauss_legendre(nr, 0.0, 1.0);
    u_rule = periodic_trapezoid(nu);
    table = kernels::radial_table(basis->modes(), r_rule.nodes, Exec::serial);
    v.resize(nr, nu);
    for (int q = 0; q < nr; ++q)
      for (int l = 0; l < nu; ++l) {
        const double r = r_rule.nodes[q], u = u_rule.nodes[l];
        v(q, l) = std::exp(-((r * std::cos(u) - 0.3) * (r * std::cos(u) - 0.3) + r * r * std::sin(u) * std::sin(u)));
      }
    d_max = 2 * basis->max_n();
    vhat = kernels::angular_coefficients(v, d_max, Exec::serial);
  }
};

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_PotentialMatrix(benchmark::State& state) {
  static const MatrixSetup s(20.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::potential_matrix(s.table, s.basis->angular(), s.r_rule, s.vhat, s.d_max, false, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_PotentialMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PotentialMatrixReference(benchmark::State& state) {
  static const MatrixSetup s(20.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::potential_matrix_reference(s.table, s.basis->angular(), s.r_rule, s.u_rule, s.v));
}
BENCHMARK(BM_PotentialMatrixReference)->Unit(benchmark::kMillisecond);

void BM_RadialTable(benchmark::State& state) {
  static const MatrixSetup s(30.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::radial_table(s.basis->modes(), s.r_rule.nodes, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_RadialTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

struct FieldSetup {
  std::vector<double> xs;
  Eigen::MatrixXcd f;
  double dA;
  kernels::PhaseAxes axes;
  std::vector<double> energies, thetas;

  FieldSetup() {
    const int n = 96;
    for (int i = 0; i < n; ++i) xs.push_back(-1.0 + 2.0 * i / (n - 1));
    dA = (xs[1] - xs[0]) * (xs[1] - xs[0]);
    f.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f(i, j) = std::polar(std::exp(-4.0 * (xs[i] * xs[i] + xs[j] * xs[j])), 10.0 * xs[i]);
    for (int i = 0; i < 16; ++i) {
      axes.x0.push_back(-0.9 + 1.8 * i / 15);
      axes.y0.push_back(-0.9 + 1.8 * i / 15);
      axes.px.push_back(-1.0 + 2.0 * i / 15);
      axes.py.push_back(-1.0 + 2.0 * i / 15);
    }
    for (int j = 0; j < 48; ++j) energies.push_back(0.5 + j);
    for (int l = 0; l < 96; ++l) thetas.push_back(6.283185307179586 * l / 96);
  }
};

void BM_CoherentOverlaps(benchmark::State& state) {
  static const FieldSetup s;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::coherent_overlaps(s.f, s.xs, s.xs, s.dA, s.axes, 0.02, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_CoherentOverlaps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CoherentOverlapsReference(benchmark::State& state) {
  static const FieldSetup s;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::coherent_overlaps_reference(s.f, s.xs, s.xs, s.dA, s.axes, 0.02));
}
BENCHMARK(BM_CoherentOverlapsReference)->Unit(benchmark::kMillisecond);

void BM_PolarFourier(benchmark::State& state) {
  static const FieldSetup s;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::polar_fourier(s.f, s.xs, s.xs, s.dA, s.energies, s.thetas, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_PolarFourier)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PolarFourierReference(benchmark::State& state) {
  static const FieldSetup s;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::polar_fourier_reference(s.f, s.xs, s.xs, s.dA, s.energies, s.thetas));
}
BENCHMARK(BM_PolarFourierReference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
