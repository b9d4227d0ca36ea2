#include "diskq/phase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace diskq {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Husimi

double HusimiGrid::mass() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * dz * dz * dxi * dxi;
}

std::pair<Vec2, Vec2> HusimiGrid::argmax() const {
  const auto it = std::max_element(values.begin(), values.end());
  auto idx = static_cast<std::size_t>(it - values.begin());
  const std::size_t nd = axes.py.size();
  const std::size_t nc = axes.px.size();
  const std::size_t nb = axes.y0.size();
  const std::size_t d = idx % nd;
  idx /= nd;
  const std::size_t c = idx % nc;
  idx /= nc;
  const std::size_t b = idx % nb;
  const std::size_t a = idx / nb;
  return {{axes.x0[a], axes.y0[b]}, {axes.px[c], axes.py[d]}};
}

HusimiGrid husimi(const WaveField& u, double h, const HusimiGridSpec& spec) {
  if (!(h > 0.0)) throw InvalidArgument("husimi: h must be positive");
  if (spec.z_points < 2 || spec.xi_points < 2 || !(spec.xi_max > spec.xi_min))
    throw InvalidArgument("husimi: degenerate grid");
  HusimiGrid g;
  g.h = h;
  g.dz = 2.0 / (spec.z_points - 1);
  g.dxi = (spec.xi_max - spec.xi_min) / (spec.xi_points - 1);
  const double limit = 0.5 * std::sqrt(h);
  if (g.dz > limit || g.dxi > limit) {
    std::ostringstream os;
    os << "husimi: grid spacing (" << g.dz << ", " << g.dxi << ") exceeds sqrt(h)/2 = " << limit;
    throw GridTooCoarse(os.str());
  }
  g.axes.x0 = linspace(-1.0, 1.0, spec.z_points);
  g.axes.y0 = g.axes.x0;
  g.axes.px = linspace(spec.xi_min, spec.xi_max, spec.xi_points);
  g.axes.py = g.axes.px;

  int nf = spec.field_points;
  if (nf <= 0) {
    const double dx = std::min(0.01, pi / (4.0 * std::max(1.0, u.basis->alpha_max())));
    nf = static_cast<int>(std::ceil(2.0 / dx)) + 1;
  }
  const auto xs = linspace(-1.0, 1.0, nf);
  const double dx = xs[1] - xs[0];
  const int radial = std::max(1025, static_cast<int>(16.0 * u.basis->alpha_max()) + 1);
  const FieldSampler field(u, radial);
  Eigen::MatrixXcd f(nf, nf);
  const bool par = spec.exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) f(i, j) = field({xs[i], xs[j]});

  const auto overlaps = kernels::coherent_overlaps(f, xs, xs, dx * dx, g.axes, h, spec.exec);
  const double norm = 1.0 / ((two_pi * h) * (two_pi * h));
  g.values.assign(overlaps.size(), 0.0);
  for (std::size_t a = 0; a < g.axes.x0.size(); ++a)
    for (std::size_t b = 0; b < g.axes.y0.size(); ++b) {
      if (g.axes.x0[a] * g.axes.x0[a] + g.axes.y0[b] * g.axes.y0[b] > 1.0) continue;
      for (std::size_t c = 0; c < g.axes.px.size(); ++c)
        for (std::size_t d = 0; d < g.axes.py.size(); ++d) {
          const auto k = g.axes.index(a, b, c, d);
          g.values[k] = norm * std::norm(overlaps[k]);
        }
    }
  return g;
}

// -------------------------------------------------------- (E, J) measures

PhaseMeasure PhaseMeasure::from_atoms(std::vector<MomentAtom> atoms, double h) {
  PhaseMeasure m;
  m.h = h;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0)) throw InvalidArgument("PhaseMeasure: negative weight");
    m.total_mass += a.weight;
  }
  m.atoms = std::move(atoms);
  return m;
}

PhaseMeasure moment_pushforward(const WaveField& u, double h) {
  if (!(h > 0.0)) throw InvalidArgument("moment_pushforward: h must be positive");
  std::vector<MomentAtom> atoms;
  for (std::size_t i = 0; i < u.basis->size(); ++i) {
    const double w = std::norm(u.coeffs[static_cast<Eigen::Index>(i)]);
    if (w == 0.0) continue;
    const auto& m = (*u.basis)[i];
    atoms.push_back({h * m.zero, h * m.angular(), w});
  }
  return PhaseMeasure::from_atoms(std::move(atoms), h);
}

std::map<int, double> j_marginal(const WaveField& u) { return angular_mass(u); }

double e_marginal_distance(const PhaseMeasure& a, const PhaseMeasure& b) {
  struct Jump {
    double E;
    double delta;
  };
  std::vector<Jump> jumps;
  for (const auto& x : a.atoms) jumps.push_back({x.E, x.weight});
  for (const auto& x : b.atoms) jumps.push_back({x.E, -x.weight});
  std::sort(jumps.begin(), jumps.end(), [](const Jump& p, const Jump& q) { return p.E < q.E; });
  double diff = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    diff += jumps[i].delta;
    if (i + 1 < jumps.size()) acc += std::abs(diff) * (jumps[i + 1].E - jumps[i].E);
  }
  return acc;
}

double ball_mass(const PhaseMeasure& m, double E, double J, double radius) {
  double acc = 0.0;
  for (const auto& a : m.atoms)
    if (std::hypot(a.E - E, a.J - J) <= radius) acc += a.weight;
  return acc;
}

double AlphaPartition::rational_mass() const {
  double acc = 0.0;
  for (const auto& [r, w] : rational) acc += w;
  return acc;
}

AlphaPartition alpha_decompose(std::span<const double> alphas, std::span<const double> weights, std::int64_t q_max,
                               double tol) {
  if (alphas.size() != weights.size()) throw InvalidArgument("alpha_decompose: size mismatch");
  AlphaPartition part;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    part.total += weights[i];
    if (const auto r = classify_angle(alphas[i], q_max, tol)) part.rational[*r] += weights[i];
    else part.irrational += weights[i];
  }
  return part;
}

AlphaPartition alpha_decompose(const PhaseMeasure& m, std::int64_t q_max, double tol) {
  std::vector<double> alphas;
  std::vector<double> weights;
  for (const auto& a : m.atoms) {
    if (!(a.E > 0.0)) throw InvalidArgument("alpha_decompose: atom with E <= 0");
    alphas.push_back(-std::asin(std::clamp(a.J / a.E, -1.0, 1.0)));
    weights.push_back(a.weight);
  }
  return alpha_decompose(alphas, weights, q_max, tol);
}

// ------------------------------------------------- Action-angle transform

double CartesianSamples::cell_area() const { return (xs[1] - xs[0]) * (ys[1] - ys[0]); }

double CartesianSamples::l2_norm() const { return std::sqrt(values.squaredNorm() * cell_area()); }

CartesianSamples sample_cartesian(const ComplexFunction& f, double half_width, int n) {
  if (n < 2 || !(half_width > 0.0)) throw InvalidArgument("sample_cartesian: degenerate grid");
  CartesianSamples s;
  s.xs = linspace(-half_width, half_width, n);
  s.ys = s.xs;
  s.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.values(i, j) = f({s.xs[i], s.ys[j]});
  return s;
}

double ActionAngleField::l2_norm() const { return std::sqrt(values.squaredNorm() * ds * dtheta); }

namespace {

Eigen::MatrixXcd e_to_s(const std::vector<double>& s, const std::vector<double>& energies, double de) {
  Eigen::MatrixXcd P(s.size(), energies.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t j = 0; j < energies.size(); ++j) P(k, j) = std::polar(de, energies[j] * s[k]);
  return P;
}

}  // namespace

Eigen::MatrixXcd ActionAngleField::second_s_derivative() const {
  Eigen::MatrixXcd weighted = spectrum;
  for (std::size_t j = 0; j < energies.size(); ++j) weighted.row(j) *= -energies[j] * energies[j];
  return e_to_s(s, energies, de) * weighted;
}

ActionAngleField action_angle_transform(const CartesianSamples& f, const TransformOptions& opt) {
  if (opt.e_points < 2 || opt.theta_points < 2 || !(opt.e_max > 0.0))
    throw InvalidArgument("action_angle_transform: degenerate transform grid");
  ActionAngleField out;
  out.de = opt.e_max / opt.e_points;
  out.dtheta = two_pi / opt.theta_points;
  out.ds = two_pi / (opt.e_points * out.de);
  for (int j = 0; j < opt.e_points; ++j) out.energies.push_back((j + 0.5) * out.de);
  for (int l = 0; l < opt.theta_points; ++l) out.theta.push_back(l * out.dtheta);
  for (int k = 0; k < opt.e_points; ++k) out.s.push_back((k - opt.e_points / 2) * out.ds);

  out.spectrum = kernels::polar_fourier(f.values, f.xs, f.ys, f.cell_area(), out.energies, out.theta, opt.exec);
  const double c = 1.0 / std::pow(two_pi, 1.5);
  for (int j = 0; j < opt.e_points; ++j) out.spectrum.row(j) *= c * std::sqrt(out.energies[j]);

  double total = 0.0;
  double tail = 0.0;
  for (int j = 0; j < opt.e_points; ++j) {
    const double w = out.spectrum.row(j).squaredNorm();
    total += w;
    if (out.energies[j] > opt.tail_band * opt.e_max) tail += w;
  }
  out.tail_share = total > 0.0 ? tail / total : 0.0;
  if (out.tail_share > opt.tail_tol) {
    std::ostringstream os;
    os << "action_angle_transform: spectral tail share " << out.tail_share << " exceeds " << opt.tail_tol;
    throw AliasingDetected(os.str());
  }
  out.values = e_to_s(out.s, out.energies, out.de) * out.spectrum;
  return out;
}

// ---------------------------------------------------- Section invariance

SectionResidual section_invariance(std::span<const WeightedPoint> samples, const PhaseSymbol& a, double step,
                                   const Tolerances& tol) {
  SectionResidual res;
  double mass = 0.0;
  for (const auto& [p, w] : samples) {
    const double E = norm(p.xi);
    if (E == 0.0) throw ZeroMomentum("section_invariance: zero momentum sample");
    mass += w;
    // Boundary points carry no mass for measures that do not charge S.
    if (norm(p.z) >= 1.0 - tol.geom) continue;
    const Vec2 dir = p.xi / E;
    res.lhs += w * E * (a(p.z + step * dir, p.xi) - a(p.z - step * dir, p.xi)) / (2.0 * step);

    const double b = dot(p.z, dir);
    const double t = b + std::sqrt(std::max(0.0, b * b + 1.0 - dot(p.z, p.z)));
    Vec2 zb = p.z - t * dir;
    zb = zb / norm(zb);
    const double sin_a = angular_momentum(p.z, p.xi) / E;
    const double cos_a = std::sqrt(std::max(0.0, 1.0 - sin_a * sin_a));
    if (cos_a < tol.tangent) continue;
    const Vec2 out = reflect(zb, p.xi, {.geom = 1e-9});
    res.rhs += w * E / (2.0 * cos_a) * (a(zb, out) - a(zb, p.xi));
  }
  if (mass > 0.0) {
    res.lhs /= mass;
    res.rhs /= mass;
  }
  return res;
}

double section_invariance_residual(std::span<const WeightedPoint> samples, const PhaseSymbol& a, double step,
                                   const Tolerances& tol) {
  return section_invariance(samples, a, step, tol).residual();
}

}  // namespace diskq
