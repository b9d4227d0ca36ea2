#include "diskq/commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "diskq/bessel.hpp"
#include "diskq/geometry.hpp"
#include "diskq/observe.hpp"
#include "diskq/phase.hpp"
#include "diskq/quadrature.hpp"
#include "diskq/spectrum.hpp"
#include "diskq/twomicro.hpp"

namespace diskq {

namespace {

using Row = std::vector<std::string>;

std::string num(double x) { return format_number(x); }
std::string num(int x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Collects the tables and manifest entries of one run.
class Artifacts {
 public:
  explicit Artifacts(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  }

  void table(const std::string& name, const Row& header, const std::vector<Row>& rows) {
    std::ofstream os(dir_ / (name + ".csv"), std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir_ / (name + ".csv")).string());
    write_row(os, header);
    for (const auto& r : rows) write_row(os, r);
  }

  void column(const std::string& name, const std::string& header, const std::vector<double>& values) {
    std::vector<Row> rows;
    rows.reserve(values.size());
    for (double v : values) rows.push_back({num(v)});
    table(name, {header}, rows);
  }

  void set(const std::string& key, const std::string& value) { summary_.emplace_back(key, value); }
  void set(const std::string& key, double value) { set(key, num(value)); }
  void threshold(const std::string& key, double value) { set("threshold_" + key, value); }

  void write_manifest() const {
    std::ofstream os(dir_ / (cfg_.command + "_manifest.txt"), std::ios::binary);
    os << "# diskq run manifest\n";
    os << "version = " << version << "\n";
#if defined(__clang__)
    os << "compiler = clang " << __clang_version__ << "\n";
#elif defined(__GNUC__)
    os << "compiler = gcc " << __VERSION__ << "\n";
#endif
    os << "eigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << "\n";
    os << "\n[config]\n";
    for (const auto& [k, v] : describe(cfg_)) os << k << " = " << v << "\n";
    os << "\n[summary]\n";
    for (const auto& [k, v] : summary_) os << k << " = " << v << "\n";
  }

 private:
  static void write_row(std::ofstream& os, const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << "\n";
  }

  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

// Portable uniform doubles from a 64-bit engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) {
    return a + (b - a) * (static_cast<double>(g_() >> 11) * 0x1.0p-53);
  }
  cplx gaussian_complex() {
    const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    return std::polar(r, two_pi * uniform()) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 g_;
};

HamiltonianOptions hamiltonian_options(const RunConfig& cfg) {
  HamiltonianOptions o;
  o.radial_nodes = cfg.radial_nodes;
  o.angular_nodes = cfg.angular_nodes;
  o.check_convergence = cfg.check_convergence;
  o.convergence_tol = cfg.convergence_tol;
  return o;
}

ObserveOptions observe_options(const RunConfig& cfg) {
  ObserveOptions o;
  o.time = cfg.time_quadrature == "simpson" ? TimeQuadrature::simpson : TimeQuadrature::spectral;
  return o;
}

BasisPtr datum_basis(const RunConfig& cfg) {
  return Basis::up_to(std::max(cfg.alpha_cut, datum_alpha_cut(cfg.datum)));
}

WaveField initial_datum(const RunConfig& cfg, BasisPtr basis) {
  auto u = parse_datum(cfg.datum, basis);
  if (u.norm() == 0.0) throw ZeroDatum("datum '" + cfg.datum + "' has no component in the basis");
  return u;
}

double unitarity_defect(const Eigen::MatrixXcd& U) {
  const auto I = Eigen::MatrixXcd::Identity(U.rows(), U.cols());
  return (U.adjoint() * U - I).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------- commands

int cmd_eigen(const RunConfig& cfg, Artifacts& out) {
  const auto m = eigenmode(cfg.n, cfg.k, cfg.sign);
  std::vector<double> r(201);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i) / 200.0;
  const auto rho = radial_density(m, r);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < r.size(); ++i) rows.push_back({num(r[i]), num(rho[i])});
  out.table("eigen", {"r", "density"}, rows);

  const double residual = std::abs(bessel_j(m.n, m.zero));
  const double mass_error = std::abs(annulus_mass(m, 0.0, 1.0) - 1.0);
  out.set("zero", m.zero);
  out.set("eigenvalue", m.eigenvalue);
  out.set("l2norm", m.l2norm);
  out.set("caustic_radius", m.gamma);
  out.set("boundary_residual", residual);
  out.set("mass_error", mass_error);
  out.set("mass_r_gt_0.9", annulus_mass(m, 0.9, 1.0));
  out.threshold("boundary_residual", 1e-12);
  out.threshold("mass_error", 1e-10);
  out.write_manifest();
  if (residual > 1e-12) throw ValidationFailure("eigen: |J_n(alpha)| = " + num(residual));
  if (mass_error > 1e-10) throw ValidationFailure("eigen: density mass off by " + num(mass_error));
  return 0;
}

int cmd_billiard(const RunConfig& cfg, Artifacts& out) {
  const auto a0 = RationalAngle::parse(cfg.alpha0);
  ActionAngle aa;
  aa.theta = cfg.theta;
  aa.J = -std::sin(a0.value());
  aa.alpha = a0.value();
  const auto p0 = from_action_angle(aa, cfg.tol);
  std::vector<Row> rows;
  double drift = 0.0;
  for (int i = 0; i <= cfg.samples; ++i) {
    const double tau = cfg.tau * i / cfg.samples;
    const auto p = flow_alpha0(p0, tau, a0, cfg.tol);
    drift = std::max({drift, std::abs(norm(p.xi) - 1.0), std::abs(angular_momentum(p.z, p.xi) - aa.J)});
    rows.push_back({num(tau), num(p.z.x), num(p.z.y), num(p.xi.x), num(p.xi.y)});
  }
  out.table("billiard", {"tau", "x", "y", "xi_x", "xi_y"}, rows);

  const auto pe = flow_alpha0(p0, cfg.tau, a0, cfg.tol);
  const double closure = std::max(norm(pe.z - p0.z), norm(pe.xi - p0.xi));
  const double period = orbit_period(p0, a0, cfg.tol);
  const double turns = cfg.tau / period;
  const bool closes = std::isfinite(period) && std::round(turns) >= 1.0 && std::abs(turns - std::round(turns)) < 1e-12;
  out.set("alpha0_radians", a0.value());
  out.set("chord_count", num(static_cast<int>(a0.chord_count())));
  out.set("period", period);
  out.set("closure_residual", closure);
  out.set("tau_is_period_multiple", closes ? "true" : "false");
  out.set("invariant_drift", drift);
  out.threshold("closure_residual", 1e-9);
  out.threshold("invariant_drift", 1e-10);
  out.write_manifest();
  if (closes && closure > 1e-9) throw ValidationFailure("billiard: orbit fails to close, residual " + num(closure));
  if (drift > 1e-10) throw ValidationFailure("billiard: E or J drift " + num(drift));
  return 0;
}

int cmd_evolve(const RunConfig& cfg, Artifacts& out) {
  const auto basis = datum_basis(cfg);
  const auto V = parse_potential(cfg.potential);
  const auto H = assemble_hamiltonian(V, basis, hamiltonian_options(cfg));
  const Propagator prop(H);
  const auto u0 = initial_datum(cfg, basis);
  const double n0 = u0.norm();
  const double e0 = prop.energy(u0);

  std::vector<Row> rows, coeffs;
  double norm_err = 0.0, energy_err = 0.0;
  for (double t : cfg.times) {
    const auto u = prop.propagate(u0, t);
    const double e = prop.energy(u);
    norm_err = std::max(norm_err, std::abs(u.norm() - n0));
    energy_err = std::max(energy_err, std::abs(e - e0));
    rows.push_back({num(t), num(u.norm()), num(e)});
    for (std::size_t i = 0; i < basis->size(); ++i) {
      const auto& m = (*basis)[i];
      const cplx c = u.coeffs[static_cast<Eigen::Index>(i)];
      coeffs.push_back({num(t), num(m.n), num(m.k), num(m.sign), num(c.real()), num(c.imag())});
    }
  }
  out.table("evolve", {"t", "norm", "energy"}, rows);
  out.table("evolve_coefficients", {"t", "n", "k", "sign", "re", "im"}, coeffs);

  out.set("basis_size", num(basis->size()));
  out.set("alpha_max", basis->alpha_max());
  out.set("angular_blocks", H.angular_blocks ? "true" : "false");
  out.set("convergence_residual", H.convergence_residual);
  out.set("initial_norm", n0);
  out.set("initial_energy", e0);
  out.set("max_norm_error", norm_err);
  out.set("max_energy_drift", energy_err);
  if (!V.constant) out.set("truncation_leakage", truncation_leakage(V, u0));
  out.threshold("norm_error", 1e-10);
  out.threshold("energy_drift", 1e-9);
  out.write_manifest();
  if (norm_err > 1e-10 * n0) throw ValidationFailure("evolve: unitarity breach " + num(norm_err));
  if (energy_err > 1e-9 * std::max(1.0, std::abs(e0))) throw ValidationFailure("evolve: energy drift " + num(energy_err));
  return 0;
}

int cmd_husimi(const RunConfig& cfg, Artifacts& out) {
  const auto basis = datum_basis(cfg);
  const auto V = parse_potential(cfg.potential);
  const Propagator prop(assemble_hamiltonian(V, basis, hamiltonian_options(cfg)));
  const auto u = prop.propagate(initial_datum(cfg, basis), cfg.t);

  HusimiGridSpec spec;
  spec.z_points = cfg.z_points;
  spec.xi_points = cfg.xi_points;
  spec.xi_min = cfg.xi_min;
  spec.xi_max = cfg.xi_max;
  const auto grid = husimi(u, cfg.h, spec);
  out.column("husimi", "value", grid.values);
  out.column("husimi_axis_x", "x", grid.axes.x0);
  out.column("husimi_axis_y", "y", grid.axes.y0);
  out.column("husimi_axis_xi_x", "xi_x", grid.axes.px);
  out.column("husimi_axis_xi_y", "xi_y", grid.axes.py);

  const auto& ax = grid.axes;
  std::vector<Row> marginal;
  for (std::size_t a = 0; a < ax.x0.size(); ++a)
    for (std::size_t b = 0; b < ax.y0.size(); ++b) {
      double acc = 0.0;
      for (std::size_t c = 0; c < ax.px.size(); ++c)
        for (std::size_t d = 0; d < ax.py.size(); ++d) acc += grid.values[ax.index(a, b, c, d)];
      marginal.push_back({num(ax.x0[a]), num(ax.y0[b]), num(acc * grid.dxi * grid.dxi)});
    }
  out.table("husimi_position", {"x", "y", "density"}, marginal);

  const auto [zmax, ximax] = grid.argmax();
  out.set("basis_size", num(basis->size()));
  out.set("field_norm", u.norm());
  out.set("dz", grid.dz);
  out.set("dxi", grid.dxi);
  out.set("grid_spacing_limit", std::sqrt(cfg.h) / 2.0);
  out.set("mass", grid.mass());
  out.set("max_value", *std::max_element(grid.values.begin(), grid.values.end()));
  out.set("argmax_x", zmax.x);
  out.set("argmax_y", zmax.y);
  out.set("argmax_xi_x", ximax.x);
  out.set("argmax_xi_y", ximax.y);
  out.write_manifest();
  return 0;
}

int cmd_pushforward(const RunConfig& cfg, Artifacts& out) {
  const auto basis = datum_basis(cfg);
  const auto V = parse_potential(cfg.potential);
  const Propagator prop(assemble_hamiltonian(V, basis, hamiltonian_options(cfg)));
  const auto u0 = initial_datum(cfg, basis);
  const auto m0 = moment_pushforward(u0, cfg.h);
  const auto j0 = j_marginal(u0);

  std::vector<Row> rows;
  double j_change = 0.0, e_drift = 0.0;
  for (double t : cfg.times) {
    const auto u = prop.propagate(u0, t);
    const auto m = moment_pushforward(u, cfg.h);
    for (const auto& a : m.atoms) rows.push_back({num(t), num(a.E), num(a.J), num(a.weight)});
    for (const auto& [key, w] : j_marginal(u)) {
      const auto it = j0.find(key);
      j_change = std::max(j_change, std::abs(w - (it == j0.end() ? 0.0 : it->second)));
    }
    e_drift = std::max(e_drift, e_marginal_distance(m0, m));
  }
  out.table("pushforward", {"t", "E", "J", "weight"}, rows);
  out.set("basis_size", num(basis->size()));
  out.set("total_mass", m0.total_mass);
  out.set("potential_is_radial", V.radial ? "true" : "false");
  out.set("j_marginal_max_change", j_change);
  out.set("e_marginal_max_drift", e_drift);
  out.write_manifest();
  return 0;
}

int cmd_decompose(const RunConfig& cfg, Artifacts& out) {
  const auto basis = datum_basis(cfg);
  const auto u0 = initial_datum(cfg, basis);
  const auto part = alpha_decompose(moment_pushforward(u0, cfg.h), cfg.q_max, cfg.class_tol);
  std::vector<Row> rows;
  for (const auto& [a, w] : part.rational)
    rows.push_back({num(static_cast<int>(a.p())), num(static_cast<int>(a.q())), num(a.value()), num(w)});
  out.table("decompose", {"p", "q", "alpha", "mass"}, rows);
  out.set("total_mass", part.total);
  out.set("rational_mass", part.rational_mass());
  out.set("irrational_mass", part.irrational);
  out.set("rational_classes", num(part.rational.size()));
  out.write_manifest();
  return 0;
}

int cmd_floquet(const RunConfig& cfg, Artifacts& out) {
  const auto a0 = RationalAngle::parse(cfg.alpha0);
  const auto V = parse_potential(cfg.potential);
  const auto avg = averaged_potential(V, a0, cfg.theta_points, cfg.tol);
  const FloquetOperator op(a0, cfg.omega, cfg.cutoff, &avg);
  const int n = op.dimension();

  // Gaussian profile in the Fourier label with seeded phases, and a seeded
  // full-rank mixed state.
  Rng rng(cfg.seed);
  const double width = std::max(0.5, cfg.cutoff / 6.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const double d = (op.label(i) - op.center()) / width;
    v[i] = std::polar(std::exp(-0.5 * d * d), two_pi * rng.uniform());
  }
  v.normalize();
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian_complex();
  DensityMatrix s0{G * G.adjoint()};
  s0.rho /= s0.trace();

  const auto vt = floquet_propagate(v, cfg.t, op);
  const auto st = propagate_density(s0, cfg.t, op);
  const double unitarity = unitarity_defect(op.propagator(cfg.t));
  const double eig_residual = (st.eigenvalues() - s0.eigenvalues()).cwiseAbs().maxCoeff();

  std::vector<Row> rows;
  for (int i = 0; i < n; ++i)
    rows.push_back({num(op.label(i)), num(std::norm(v[i])), num(std::norm(vt[i])), num(s0.rho(i, i).real()),
                    num(st.rho(i, i).real())});
  out.table("floquet", {"label", "weight_0", "weight_t", "density_0", "density_t"}, rows);
  std::vector<Row> pot;
  for (std::size_t l = 0; l < avg.theta.size(); ++l) pot.push_back({num(avg.theta[l]), num(avg.values[l])});
  out.table("floquet_potential", {"theta", "averaged_potential"}, pot);

  out.set("dimension", num(n));
  out.set("center_label", num(op.center()));
  out.set("time_scale", op.time_scale());
  out.set("diagonal", op.diagonal() ? "true" : "false");
  out.set("unitarity_residual", unitarity);
  out.set("norm_error", std::abs(vt.norm() - 1.0));
  out.set("density_eigenvalue_residual", eig_residual);
  out.set("density_trace_error", std::abs(st.trace() - 1.0));
  const auto& f = V.value;
  out.set("nu_on_shell", nu_functional(st, [&f](Vec2 z, Vec2) { return f(z); }, op, 1.0, 0.5, cfg.theta_points));
  out.threshold("cutoff_tail", 1e-10);
  out.threshold("unitarity_residual", 1e-10);
  out.threshold("density_eigenvalue_residual", 1e-8);
  out.write_manifest();
  if (unitarity > 1e-10) throw ValidationFailure("floquet: unitarity breach " + num(unitarity));
  if (eig_residual > 1e-8) throw ValidationFailure("floquet: density spectrum drift " + num(eig_residual));
  return 0;
}

int cmd_observe(const RunConfig& cfg, Artifacts& out) {
  const auto family = FamilySpec::parse(cfg.family);
  const auto V = parse_potential(cfg.potential);
  const auto hopt = hamiltonian_options(cfg);
  const auto oopt = observe_options(cfg);
  std::vector<Region> regions;
  for (const auto& r : cfg.regions) regions.push_back(Region::parse(r));
  const auto rep = sweep(family, regions, cfg.T, V, hopt, oopt);

  std::vector<Row> rows;
  for (const auto& r : rep.rows) rows.push_back({r.datum, "interior", r.region, num(r.quotient)});
  double min_q = rep.min_quotient();
  for (const auto& [region, m] : rep.minima) out.set("min_quotient[" + region + "]", m);

  if (!cfg.arcs.empty()) {
    const auto basis = Basis::up_to(family.alpha_cut());
    const Propagator prop(assemble_hamiltonian(V, basis, hopt));
    const auto members = build_family(family, basis);
    for (const auto& text : cfg.arcs) {
      const auto arc = parse_arc(text);
      double m = std::numeric_limits<double>::infinity();
      for (const auto& member : members) {
        const double q = boundary_quotient(member.datum, prop, arc, cfg.T, oopt);
        rows.push_back({member.label, "boundary", text, num(q)});
        m = std::min(m, q);
      }
      out.set("min_quotient[arc " + text + "]", m);
      min_q = std::min(min_q, m);
    }
  }
  out.table("observe", {"datum", "kind", "target", "quotient"}, rows);
  out.set("family_size", num(rows.size() / std::max<std::size_t>(1, cfg.regions.size() + cfg.arcs.size())));
  out.set("min_quotient", min_q);
  out.write_manifest();
  return 0;
}

int cmd_selftest(const RunConfig& cfg, Artifacts& out) {
  const auto checks = selftest_checks(cfg);
  std::vector<Row> rows;
  int failed = 0;
  for (const auto& c : checks) {
    rows.push_back({c.name, num(c.value), num(c.threshold), c.pass() ? "1" : "0"});
    if (!c.pass()) ++failed;
  }
  out.table("selftest", {"check", "value", "threshold", "pass"}, rows);
  out.set("checks", num(checks.size()));
  out.set("failed", num(failed));
  out.write_manifest();
  return failed ? 3 : 0;
}

// --------------------------------------------------------- selftest checks

PhasePoint random_interior(Rng& rng, const Tolerances& tol) {
  const double r = std::sqrt(rng.uniform(0.0, 0.8));
  const double phi = rng.uniform(0.0, two_pi);
  return PhasePoint::make({r * std::cos(phi), r * std::sin(phi)}, rotate({1.0, 0.0}, rng.uniform(0.0, two_pi)), tol);
}

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
  return std::max(norm(a.z - b.z), norm(a.xi - b.xi));
}

void dynamics_checks(const RunConfig& cfg, Rng& rng, std::vector<Check>& out) {
  const auto& tol = cfg.tol;
  double inv = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 z = rotate({1.0, 0.0}, rng.uniform(0.0, two_pi));
    const Vec2 xi = rotate({rng.uniform(0.5, 2.0), 0.0}, rng.uniform(0.0, two_pi));
    inv = std::max(inv, norm(reflect(z, reflect(z, xi, tol), tol) - xi));
  }
  out.push_back({"reflection_involution", inv, 1e-14});

  // 1000 bounces, one chord (length 2 sqrt(1 - J^2) at unit speed) at a time.
  auto p = random_interior(rng, tol);
  const double J0 = angular_momentum(p.z, p.xi);
  const double chord = 2.0 * std::sqrt(1.0 - J0 * J0);
  double dE = 0.0, dJ = 0.0;
  for (int b = 0; b < 1000; ++b) {
    const auto next = billiard_flow(p, chord, tol);
    dE = std::max(dE, std::abs(norm(next.xi) - norm(p.xi)));
    dJ = std::max(dJ, std::abs(angular_momentum(next.z, next.xi) - angular_momentum(p.z, p.xi)));
    p = next;
  }
  out.push_back({"energy_drift_per_bounce", dE, 1e-12});
  out.push_back({"momentum_drift_per_bounce", dJ, 1e-12});

  double group = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto q = random_interior(rng, tol);
    const double t1 = rng.uniform(0.0, 20.0), t2 = rng.uniform(-20.0, 20.0);
    group = std::max(group, phase_distance(billiard_flow(q, t1 + t2, tol), billiard_flow(billiard_flow(q, t1, tol), t2, tol)));
  }
  out.push_back({"group_law", group, 1e-10});

  const RationalAngle a0(1, 6);
  ActionAngle aa;
  aa.J = -std::sin(a0.value());
  aa.alpha = a0.value();
  const auto q0 = from_action_angle(aa, tol);
  out.push_back({"triangle_closure", phase_distance(flow_alpha0(q0, 6.0, a0, tol), q0), 1e-9});

  double round = 0.0, sympl = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ActionAngle b;
    b.E = rng.uniform(0.5, 2.0);
    b.J = b.E * rng.uniform(-0.95, 0.95);
    b.theta = rng.uniform(0.0, two_pi);
    b.s = rng.uniform(-0.9, 0.9) * std::sqrt(1.0 - (b.J / b.E) * (b.J / b.E));
    const auto back = to_action_angle(from_action_angle(b, tol));
    const double dtheta = std::abs(std::remainder(back.theta - b.theta, two_pi));
    round = std::max({round, std::abs(back.s - b.s), dtheta, std::abs(back.E - b.E), std::abs(back.J - b.J)});
    if (i < 200) sympl = std::max(sympl, symplectic_defect(b, 1e-5));
  }
  out.push_back({"action_angle_roundtrip", round, 1e-12});
  out.push_back({"symplectic_defect", sympl, 1e-8});
}

void spectrum_checks(std::vector<Check>& out) {
  double residual = 0.0;
  int interlace = 0;
  std::vector<std::vector<double>> zeros;
  for (int n = 0; n <= 17; ++n) zeros.push_back(bessel_zeros(n, 51));
  for (int n = 0; n <= 16; ++n) {
    for (int k = 0; k < 50; ++k) residual = std::max(residual, std::abs(bessel_j(n, zeros[n][k])));
    for (int k = 0; k < 50; ++k)
      if (!(zeros[n][k] < zeros[n + 1][k] && zeros[n + 1][k] < zeros[n][k + 1])) ++interlace;
  }
  out.push_back({"bessel_zero_residual", residual, 1e-12});
  out.push_back({"zero_interlacing_violations", static_cast<double>(interlace), 0.0});

  // Radial orthogonality of J_3(alpha_{3,k} r) in L2(r dr).
  const auto rule = composite_gauss_legendre(16, 32, 0.0, 1.0);
  std::vector<Eigenmode> modes;
  for (int k = 1; k <= 10; ++k) modes.push_back(eigenmode(3, k, 1));
  double ortho = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double r = rule.nodes[q];
        acc += rule.weights[q] * r * normalized_radial(modes[i], r) * normalized_radial(modes[j], r);
      }
      ortho = std::max(ortho, std::abs(two_pi * acc - (i == j ? 1.0 : 0.0)));
    }
  out.push_back({"mode_orthonormality", ortho, 1e-10});

  double prev = 0.0;
  int monotone = 0;
  for (int n : {10, 20, 40, 80}) {
    const double m = annulus_mass(eigenmode(n, 1, 1), 0.9, 1.0);
    if (m <= prev) ++monotone;
    prev = m;
  }
  out.push_back({"whisper_monotonicity_violations", static_cast<double>(monotone), 0.0});
  out.push_back({"whisper_n80_deficit", std::max(0.0, 0.9 - prev), 0.0});
}

void evolution_checks(const RunConfig& cfg, Rng& rng, std::vector<Check>& out) {
  const auto basis = Basis::up_to(15.0);
  auto u0 = WaveField::zero(basis);
  for (Eigen::Index i = 0; i < u0.coeffs.size(); ++i) u0.coeffs[i] = rng.gaussian_complex();
  u0.coeffs.normalize();

  HamiltonianOptions hopt;
  hopt.radial_nodes = 128;
  hopt.angular_nodes = 128;
  const Propagator prop(assemble_hamiltonian(PotentialSpec::x_linear(1.0), basis, hopt));
  const double e0 = prop.energy(u0);
  double unit = 0.0, energy = 0.0;
  for (double t : {1.0, 10.0, 100.0}) {
    const auto u = prop.propagate(u0, t);
    unit = std::max(unit, std::abs(u.norm() - 1.0));
    energy = std::max(energy, std::abs(prop.energy(u) - e0));
  }
  out.push_back({"propagator_unitarity", unit, 1e-10});
  out.push_back({"energy_conservation", energy, 1e-9 * std::max(1.0, std::abs(e0))});

  const Propagator free(assemble_hamiltonian(PotentialSpec::zero(), basis, hopt));
  const auto mode = WaveField::mode(basis, 2, 3, -1);
  PolarGrid grid;
  for (int i = 0; i <= 20; ++i) grid.r.push_back(i / 20.0);
  for (int j = 0; j < 16; ++j) grid.u.push_back(two_pi * j / 16);
  const Eigen::MatrixXd d0 = sample_grid(mode, grid).cwiseAbs2();
  const Eigen::MatrixXd d1 = sample_grid(free.propagate(mode, 3.7), grid).cwiseAbs2();
  out.push_back({"stationary_density", (d1 - d0).cwiseAbs().maxCoeff(), 1e-10});

  const auto pf = moment_pushforward(u0, cfg.h);
  out.push_back({"pushforward_mass", std::abs(pf.total_mass - 1.0), 1e-12});
}

void floquet_checks(Rng& rng, std::vector<Check>& out) {
  const RationalAngle a0(1, 6);
  const auto avg = averaged_potential(PotentialSpec::gaussian_bump({0.3, 0.1}, 0.3, 2.0), a0, 64);
  const FloquetOperator op(a0, 1.3, 12, &avg);
  const int n = op.dimension();
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian_complex();
  DensityMatrix s{G * G.adjoint()};
  s.rho /= s.trace();
  out.push_back({"floquet_unitarity", unitarity_defect(op.propagator(0.7)), 1e-10});
  out.push_back({"density_spectrum", (propagate_density(s, 0.7, op).eigenvalues() - s.eigenvalues()).cwiseAbs().maxCoeff(),
                 1e-8});

  const FloquetOperator op0(a0, 1.3, 12);
  const auto s0 = propagate_density(s, 0.7, op0);
  out.push_back({"free_fourier_fixed_points", (s0.rho.diagonal() - s.rho.diagonal()).cwiseAbs().maxCoeff(), 0.0});
}

void observe_checks(Rng& rng, std::vector<Check>& out) {
  const auto basis = Basis::up_to(12.0);
  HamiltonianOptions hopt;
  hopt.radial_nodes = 128;
  hopt.angular_nodes = 128;
  const Propagator prop(assemble_hamiltonian(PotentialSpec::zero(), basis, hopt));
  auto u0 = WaveField::zero(basis);
  for (Eigen::Index i = 0; i < u0.coeffs.size(); ++i) u0.coeffs[i] = rng.gaussian_complex();
  out.push_back({"full_disk_quotient", std::abs(interior_quotient(u0, prop, Region::annulus(0.0, 1.0), 1.3) - 1.0),
                 1e-10});

  const auto mode = WaveField::mode(basis, 3, 2, 1);
  const double len = 1.1;
  const double full = interior_quotient(mode, prop, Region::annulus(0.8, 1.0), 1.0);
  const double part = interior_quotient(mode, prop, Region::sector(0.8, 1.0, 0.3, len), 1.0);
  out.push_back({"sector_identity", std::abs(part - len / two_pi * full), 1e-10});

  const auto g = WaveField::mode(basis, 0, 1, 1);
  const double tau = trace_coefficients(*basis)[static_cast<Eigen::Index>(*basis->index_of(0, 1, 1))];
  const double a = (*basis)[*basis->index_of(0, 1, 1)].zero;
  const double closed = two_pi * tau * tau * 1.0 / (1.0 + a * a);
  out.push_back({"boundary_closed_form", std::abs(boundary_quotient(g, prop, BoundaryArc{}, 1.0) - closed), 1e-8});
}

void transform_checks(std::vector<Check>& out) {
  const double sigma = 0.3;
  const Vec2 c{0.3, -0.2}, k{12.0, 16.0};
  auto f = [&](Vec2 z) {
    const Vec2 w = z - c;
    return std::exp(cplx(-dot(w, w) / (2 * sigma * sigma), dot(k, z)));
  };
  auto lap = [&](Vec2 z) {
    const Vec2 w = z - c;
    const cplx gx = -w.x / (sigma * sigma) + cplx(0, k.x), gy = -w.y / (sigma * sigma) + cplx(0, k.y);
    return (gx * gx + gy * gy - 2.0 / (sigma * sigma)) * f(z);
  };
  TransformOptions opt;
  opt.e_points = 96;
  opt.theta_points = 192;
  const auto s = sample_cartesian(f, 2.5, 81);
  const auto U = action_angle_transform(s, opt);
  const auto UL = action_angle_transform(sample_cartesian(lap, 2.5, 81), opt);
  out.push_back({"transform_unitarity", std::abs(U.l2_norm() - s.l2_norm()) / s.l2_norm(), 1e-6});
  out.push_back({"transform_intertwining", (U.second_s_derivative() - UL.values).norm() / UL.values.norm(), 1e-6});
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"eigen",       "billiard",  "evolve",  "husimi",  "pushforward",
                                                 "decompose",   "floquet",   "observe", "selftest"};
  return names;
}

std::vector<Check> selftest_checks(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<Check> out;
  dynamics_checks(cfg, rng, out);
  spectrum_checks(out);
  evolution_checks(cfg, rng, out);
  floquet_checks(rng, out);
  observe_checks(rng, out);
  transform_checks(out);
  return out;
}

int run(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.threads > 0) set_threads(cfg.threads);
  Artifacts out(cfg);
  const auto& c = cfg.command;
  if (c == "eigen") return cmd_eigen(cfg, out);
  if (c == "billiard") return cmd_billiard(cfg, out);
  if (c == "evolve") return cmd_evolve(cfg, out);
  if (c == "husimi") return cmd_husimi(cfg, out);
  if (c == "pushforward") return cmd_pushforward(cfg, out);
  if (c == "decompose") return cmd_decompose(cfg, out);
  if (c == "floquet") return cmd_floquet(cfg, out);
  if (c == "observe") return cmd_observe(cfg, out);
  if (c == "selftest") return cmd_selftest(cfg, out);
  throw ConfigError("unknown command '" + c + "'");
}

}  // namespace diskq
