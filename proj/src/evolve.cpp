#include "diskq/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "diskq/bessel.hpp"
#include "diskq/quadrature.hpp"

namespace diskq {

// ---------------------------------------------------------------- Basis

Basis::Basis(std::vector<Eigenmode> modes) : modes_(std::move(modes)) {
  std::sort(modes_.begin(), modes_.end(), [](const Eigenmode& a, const Eigenmode& b) {
    if (a.zero != b.zero) return a.zero < b.zero;
    if (a.n != b.n) return a.n < b.n;
    return a.sign > b.sign;
  });
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    angular_.push_back(m.angular());
    lookup_[{m.n, m.k, m.sign}] = i;
    max_n_ = std::max(max_n_, m.n);
    alpha_max_ = std::max(alpha_max_, m.zero);
  }
}

BasisPtr Basis::up_to(double alpha_cut, const BesselLimits& limits) {
  std::vector<Eigenmode> modes;
  for (int n = 0; n <= limits.n_max; ++n) {
    const auto zeros = bessel_zeros_below(n, alpha_cut, limits);
    if (zeros.empty()) break;  // alpha_{n,1} increases with n
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      modes.push_back(eigenmode_from_zero(n, static_cast<int>(k) + 1, 1, zeros[k], limits));
      if (n > 0) modes.push_back(eigenmode_from_zero(n, static_cast<int>(k) + 1, -1, zeros[k], limits));
    }
  }
  return BasisPtr(new Basis(std::move(modes)));
}

BasisPtr Basis::from_indices(std::span<const ModeIndex> indices, const BesselLimits& limits) {
  std::vector<Eigenmode> modes;
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& [n, k] : indices) {
    if (seen[{n, k}]) continue;
    seen[{n, k}] = true;
    const auto plus = eigenmode(n, k, 1, limits);
    modes.push_back(plus);
    if (n > 0) {
      auto minus = plus;
      minus.sign = -1;
      modes.push_back(minus);
    }
  }
  return BasisPtr(new Basis(std::move(modes)));
}

std::optional<std::size_t> Basis::index_of(int n, int k, int sign) const {
  if (n == 0) sign = 1;
  const auto it = lookup_.find({n, k, sign});
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

// ------------------------------------------------------------ WaveField

WaveField WaveField::zero(BasisPtr basis) {
  WaveField u;
  u.coeffs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  u.basis = std::move(basis);
  return u;
}

WaveField WaveField::mode(BasisPtr basis, int n, int k, int sign) {
  const auto idx = basis->index_of(n, k, sign);
  if (!idx) throw OutOfRange("WaveField::mode: mode not in basis");
  auto u = zero(std::move(basis));
  u.coeffs[static_cast<Eigen::Index>(*idx)] = 1.0;
  return u;
}

double WaveField::h1_norm_squared() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < basis->size(); ++i)
    acc += (1.0 + (*basis)[i].eigenvalue) * std::norm(coeffs[static_cast<Eigen::Index>(i)]);
  return acc;
}

namespace {

struct PolarQuadrature {
  QuadratureRule r;
  QuadratureRule u;
};

PolarQuadrature polar_quadrature(int radial_nodes, int angular_nodes) {
  return {gauss_legendre(radial_nodes, 0.0, 1.0), periodic_trapezoid(angular_nodes)};
}

Eigen::MatrixXd sample_potential(const PotentialSpec& V, const PolarQuadrature& pq) {
  Eigen::MatrixXd v(pq.r.size(), pq.u.size());
  for (std::size_t l = 0; l < pq.u.size(); ++l) {
    const Vec2 dir{std::cos(pq.u.nodes[l]), std::sin(pq.u.nodes[l])};
    for (std::size_t q = 0; q < pq.r.size(); ++q) v(q, l) = V.value(dir * pq.r.nodes[q]);
  }
  return v;
}

}  // namespace

WaveField project(BasisPtr basis, const ComplexFunction& f, const ProjectionOptions& opt) {
  const auto pq = polar_quadrature(opt.radial_nodes, opt.angular_nodes);
  const int Q = static_cast<int>(pq.r.size());
  const int L = static_cast<int>(pq.u.size());
  Eigen::MatrixXd re(Q, L);
  Eigen::MatrixXd im(Q, L);
  for (int l = 0; l < L; ++l) {
    const Vec2 dir{std::cos(pq.u.nodes[l]), std::sin(pq.u.nodes[l])};
    for (int q = 0; q < Q; ++q) {
      const cplx v = f(dir * pq.r.nodes[q]);
      re(q, l) = v.real();
      im(q, l) = v.imag();
    }
  }
  const int d_max = basis->max_n();
  if (2 * d_max >= L) throw QuadratureUnderResolved("project: angular grid too coarse for the basis");
  const auto fr = kernels::angular_coefficients(re, d_max, opt.exec);
  const auto fi = kernels::angular_coefficients(im, d_max, opt.exec);
  const auto table = kernels::radial_table(basis->modes(), pq.r.nodes, opt.exec);
  auto u = WaveField::zero(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const int col = basis->angular()[i] + d_max;
    cplx acc = 0.0;
    for (int q = 0; q < Q; ++q)
      acc += pq.r.weights[q] * pq.r.nodes[q] * table(static_cast<Eigen::Index>(i), q) *
             cplx(fr(q, col) + cplx(0.0, 1.0) * fi(q, col));
    u.coeffs[static_cast<Eigen::Index>(i)] = two_pi * acc;
  }
  return u;
}

cplx coherent_value(Vec2 z, Vec2 z0, Vec2 xi0, double h) {
  const Vec2 w = z - z0;
  return std::exp(-dot(w, w) / (2.0 * h)) * std::polar(1.0 / std::sqrt(pi * h), dot(xi0, w) / h);
}

WaveField coherent_state(BasisPtr basis, Vec2 z0, Vec2 xi0, double h, const ProjectionOptions& opt) {
  if (!(h > 0.0)) throw InvalidArgument("coherent_state: h must be positive");
  return project(std::move(basis), [=](Vec2 z) { return coherent_value(z, z0, xi0, h); }, opt);
}

WaveField rotate(const WaveField& u, double beta) {
  WaveField out = u;
  for (std::size_t i = 0; i < u.basis->size(); ++i)
    out.coeffs[static_cast<Eigen::Index>(i)] *= std::polar(1.0, -u.basis->angular()[i] * beta);
  return out;
}

std::map<int, double> angular_mass(const WaveField& u) {
  std::map<int, double> mass;
  for (std::size_t i = 0; i < u.basis->size(); ++i)
    mass[u.basis->angular()[i]] += std::norm(u.coeffs[static_cast<Eigen::Index>(i)]);
  return mass;
}

// ------------------------------------------------------------ Potentials

PotentialSpec PotentialSpec::zero() { return {}; }

PotentialSpec PotentialSpec::constant_value(double c) {
  std::ostringstream os;
  os.precision(17);
  os << "constant:" << c;
  return {os.str(), [c](Vec2) { return c; }, true, true};
}

PotentialSpec PotentialSpec::radial_polynomial(std::vector<double> coeffs) {
  std::ostringstream os;
  os.precision(17);
  os << "radial_poly:";
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "," : "") << coeffs[k];
  bool constant = true;
  for (std::size_t k = 1; k < coeffs.size(); ++k) constant = constant && coeffs[k] == 0.0;
  auto f = [c = std::move(coeffs)](Vec2 z) {
    const double r = norm(z);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
    return acc;
  };
  return {os.str(), f, true, constant};
}

PotentialSpec PotentialSpec::x_linear(double slope) {
  std::ostringstream os;
  os.precision(17);
  os << "x_linear:" << slope;
  return {os.str(), [slope](Vec2 z) { return slope * z.x; }, slope == 0.0, slope == 0.0};
}

PotentialSpec PotentialSpec::gaussian_bump(Vec2 center, double width, double amplitude) {
  if (!(width > 0.0)) throw InvalidArgument("gaussian_bump: width must be positive");
  std::ostringstream os;
  os.precision(17);
  os << "gaussian:" << center.x << "," << center.y << "," << width << "," << amplitude;
  const bool radial = center.x == 0.0 && center.y == 0.0;
  auto f = [=](Vec2 z) {
    const Vec2 w = z - center;
    return amplitude * std::exp(-dot(w, w) / (2.0 * width * width));
  };
  return {os.str(), f, radial || amplitude == 0.0, amplitude == 0.0};
}

// ----------------------------------------------------------- Hamiltonian

Eigen::MatrixXcd potential_matrix(const PotentialSpec& V, const Basis& basis, int radial_nodes, int angular_nodes,
                                  Exec exec) {
  const auto K = static_cast<Eigen::Index>(basis.size());
  if (V.constant) return V.value({0.0, 0.0}) * Eigen::MatrixXcd::Identity(K, K);
  const auto pq = polar_quadrature(radial_nodes, angular_nodes);
  const int d_max = V.radial ? 0 : 2 * basis.max_n();
  if (2 * d_max >= angular_nodes)
    throw QuadratureUnderResolved("assemble_hamiltonian: angular grid too coarse for the basis");
  const auto v = sample_potential(V, pq);
  const auto vhat = kernels::angular_coefficients(v, d_max, exec);
  const auto table = kernels::radial_table(basis.modes(), pq.r.nodes, exec);
  return kernels::potential_matrix(table, basis.angular(), pq.r, vhat, d_max, V.radial, exec);
}

Eigen::MatrixXcd Hamiltonian::potential_part() const {
  Eigen::MatrixXcd M = matrix;
  for (std::size_t i = 0; i < basis->size(); ++i)
    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= 0.5 * (*basis)[i].eigenvalue;
  return M;
}

Hamiltonian assemble_hamiltonian(const PotentialSpec& V, BasisPtr basis, const HamiltonianOptions& opt) {
  Hamiltonian H;
  H.basis = basis;
  Eigen::MatrixXcd M = potential_matrix(V, *basis, opt.radial_nodes, opt.angular_nodes, opt.exec);
  if (opt.check_convergence && !V.constant) {
    const Eigen::MatrixXcd fine =
        potential_matrix(V, *basis, 2 * opt.radial_nodes, 2 * opt.angular_nodes, opt.exec);
    H.convergence_residual = (fine - M).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (H.convergence_residual > opt.convergence_tol * scale) {
      std::ostringstream os;
      os << "assemble_hamiltonian: quadrature self-convergence residual " << H.convergence_residual;
      throw QuadratureUnderResolved(os.str());
    }
  }
  H.matrix = std::move(M);
  const auto K = static_cast<Eigen::Index>(basis->size());
  for (Eigen::Index i = 0; i < K; ++i) H.matrix(i, i) += 0.5 * (*basis)[static_cast<std::size_t>(i)].eigenvalue;
  const auto& ang = basis->angular();
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j) {
      if (i == j || H.matrix(i, j) == cplx(0.0)) continue;
      H.diagonal = false;
      if (ang[static_cast<std::size_t>(i)] != ang[static_cast<std::size_t>(j)]) H.angular_blocks = false;
    }
  return H;
}

// ------------------------------------------------------------ Propagator

Propagator::Propagator(const Hamiltonian& H)
    : basis_(H.basis), H_(H.matrix), angular_blocks_(H.angular_blocks) {
  const auto K = static_cast<int>(basis_->size());
  std::vector<std::vector<int>> groups;
  if (angular_blocks_) {
    std::map<int, std::vector<int>> by_m;
    for (int i = 0; i < K; ++i) by_m[basis_->angular()[static_cast<std::size_t>(i)]].push_back(i);
    for (auto& [m, idx] : by_m) groups.push_back(std::move(idx));
  } else {
    std::vector<int> all(K);
    for (int i = 0; i < K; ++i) all[i] = i;
    groups.push_back(std::move(all));
  }
  for (auto& idx : groups) {
    Block b;
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd sub(n, n);
    bool diag = true;
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index c = 0; c < n; ++c) {
        sub(a, c) = H_(idx[a], idx[c]);
        if (a != c && sub(a, c) != cplx(0.0)) diag = false;
      }
    if (diag) {
      b.energies = sub.diagonal().real();
      b.vectors = Eigen::MatrixXcd::Identity(n, n);
      b.identity = true;
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
      b.energies = es.eigenvalues();
      b.vectors = es.eigenvectors();
    }
    b.indices = std::move(idx);
    blocks_.push_back(std::move(b));
  }
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& c, double t) const {
  Eigen::VectorXcd out(c.size());
  for (const auto& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    Eigen::VectorXcd local(n);
    for (Eigen::Index a = 0; a < n; ++a) local[a] = c[b.indices[a]];
    Eigen::VectorXcd w = b.identity ? local : Eigen::VectorXcd(b.vectors.adjoint() * local);
    for (Eigen::Index a = 0; a < n; ++a) w[a] *= std::polar(1.0, -b.energies[a] * t);
    if (!b.identity) w = b.vectors * w;
    for (Eigen::Index a = 0; a < n; ++a) out[b.indices[a]] = w[a];
  }
  return out;
}

WaveField Propagator::propagate(const WaveField& u, double t) const {
  if (u.basis != basis_) throw InvalidArgument("propagate: wavefield basis differs from the Hamiltonian's");
  WaveField out = u;
  out.coeffs = apply(u.coeffs, t);
  out.time = u.time + t;
  return out;
}

double Propagator::energy(const WaveField& u) const { return u.coeffs.dot(H_ * u.coeffs).real(); }

Eigen::VectorXcd Propagator::to_eigenbasis(const Eigen::VectorXcd& c) const {
  Eigen::VectorXcd out(c.size());
  Eigen::Index pos = 0;
  for (const auto& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    Eigen::VectorXcd local(n);
    for (Eigen::Index a = 0; a < n; ++a) local[a] = c[b.indices[a]];
    out.segment(pos, n) = b.identity ? local : Eigen::VectorXcd(b.vectors.adjoint() * local);
    pos += n;
  }
  return out;
}

Eigen::VectorXcd Propagator::from_eigenbasis(const Eigen::VectorXcd& w) const {
  Eigen::VectorXcd out(w.size());
  Eigen::Index pos = 0;
  for (const auto& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    Eigen::VectorXcd local = w.segment(pos, n);
    if (!b.identity) local = b.vectors * local;
    for (Eigen::Index a = 0; a < n; ++a) out[b.indices[a]] = local[a];
    pos += n;
  }
  return out;
}

Eigen::VectorXd Propagator::energies() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(basis_->size()));
  Eigen::Index pos = 0;
  for (const auto& b : blocks_) {
    out.segment(pos, b.energies.size()) = b.energies;
    pos += b.energies.size();
  }
  return out;
}

// -------------------------------------------------------------- Sampling

Eigen::MatrixXcd sample_grid(const WaveField& u, const PolarGrid& grid, Exec exec) {
  for (double r : grid.r)
    if (r < 0.0 || r > 1.0) throw OutOfRange("sample_grid: radius outside [0, 1]");
  const auto& basis = *u.basis;
  const auto table = kernels::radial_table(basis.modes(), grid.r, exec);
  const int max_n = basis.max_n();
  const int nm = 2 * max_n + 1;
  const auto nr = static_cast<Eigen::Index>(grid.r.size());
  // R(m + max_n, i) = sum_{m_j = m} c_j T_j(r_i)
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(nm, nr);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const cplx c = u.coeffs[static_cast<Eigen::Index>(j)];
    if (c == cplx(0.0)) continue;
    R.row(basis.angular()[j] + max_n) += c * table.row(static_cast<Eigen::Index>(j));
  }
  std::vector<int> active;
  for (int m = 0; m < nm; ++m)
    if (R.row(m).cwiseAbs().maxCoeff() > 0.0) active.push_back(m);
  const auto nu = static_cast<Eigen::Index>(grid.u.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nr, nu);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (Eigen::Index l = 0; l < nu; ++l) {
    for (int m : active) {
      const cplx e = std::polar(1.0, (m - max_n) * grid.u[static_cast<std::size_t>(l)]);
      for (Eigen::Index i = 0; i < nr; ++i) out(i, l) += R(m, i) * e;
    }
  }
  return out;
}

std::vector<cplx> sample_points(const WaveField& u, std::span<const Vec2> points, Exec exec) {
  return kernels::sample_points(u.basis->modes(), u.coeffs, points, exec);
}

FieldSampler::FieldSampler(const WaveField& u, int radial_points)
    : n_points_(radial_points), dr_(1.0 / (radial_points - 1)) {
  if (radial_points < 2) throw InvalidArgument("FieldSampler: need at least two radial points");
  const auto& basis = *u.basis;
  std::map<int, std::vector<std::size_t>> by_m;
  for (std::size_t j = 0; j < basis.size(); ++j)
    if (u.coeffs[static_cast<Eigen::Index>(j)] != cplx(0.0)) by_m[basis.angular()[j]].push_back(j);
  for (const auto& [m, idx] : by_m) {
    ms_.push_back(m);
    std::vector<cplx> val(n_points_, cplx(0.0));
    std::vector<cplx> der(n_points_, cplx(0.0));
    for (std::size_t j : idx) {
      const auto& mode = basis[j];
      const cplx c = u.coeffs[static_cast<Eigen::Index>(j)];
      for (int p = 0; p < n_points_; ++p) {
        const double x = mode.zero * p * dr_;
        const auto bp = bessel_j_pair(mode.n, x);
        val[p] += c * bp.jn / mode.l2norm;
        const double d = x == 0.0 ? (mode.n == 1 ? 0.5 : 0.0) : (mode.n / x) * bp.jn - bp.jn1;
        der[p] += c * mode.zero * d / mode.l2norm;
      }
    }
    value_.push_back(std::move(val));
    slope_.push_back(std::move(der));
  }
}

cplx FieldSampler::operator()(Vec2 z) const {
  const double r = norm(z);
  if (r > 1.0) return 0.0;
  const double u = std::atan2(z.y, z.x);
  const double pos = r / dr_;
  const int p = std::min(static_cast<int>(pos), n_points_ - 2);
  const double t = pos - p;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  cplx acc = 0.0;
  for (std::size_t a = 0; a < ms_.size(); ++a) {
    const auto& v = value_[a];
    const auto& d = slope_[a];
    const cplx radial = h00 * v[p] + h10 * dr_ * d[p] + h01 * v[p + 1] + h11 * dr_ * d[p + 1];
    acc += radial * std::polar(1.0, ms_[a] * u);
  }
  return acc;
}

// ---------------------------------------------------------------- Traces

Eigen::VectorXd trace_coefficients(const Basis& basis) {
  Eigen::VectorXd tau(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& m = basis[i];
    tau[static_cast<Eigen::Index>(i)] = m.zero * bessel_j_derivative(m.n, m.zero) / m.l2norm;
  }
  return tau;
}

void check_trace_tail(const WaveField& u, const TraceOptions& opt) {
  const auto& basis = *u.basis;
  const double cut = opt.tail_band * basis.alpha_max();
  double total = 0.0;
  double tail = 0.0;
  bool below = false;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(u.coeffs[static_cast<Eigen::Index>(i)]) * basis[i].eigenvalue;
    total += w;
    if (basis[i].zero > cut) tail += w;
    else if (w > 0.0) below = true;
  }
  // A datum living entirely in the top band is a finite combination of
  // resolved modes; only broadband data can signal a divergent series.
  if (below && total > 0.0 && tail > opt.tail_fraction * total) {
    std::ostringstream os;
    os << "neumann_trace: tail band carries " << tail / total << " of the trace weight";
    throw TraceDiverging(os.str());
  }
}

std::vector<cplx> neumann_trace(const WaveField& u, std::span<const double> angles, const TraceOptions& opt) {
  if (opt.check) check_trace_tail(u, opt);
  const auto tau = trace_coefficients(*u.basis);
  const auto& ang = u.basis->angular();
  std::vector<cplx> out(angles.size(), cplx(0.0));
  for (std::size_t i = 0; i < u.basis->size(); ++i) {
    const cplx c = u.coeffs[static_cast<Eigen::Index>(i)] * tau[static_cast<Eigen::Index>(i)];
    if (c == cplx(0.0)) continue;
    for (std::size_t j = 0; j < angles.size(); ++j) out[j] += c * std::polar(1.0, ang[i] * angles[j]);
  }
  return out;
}

double truncation_leakage(const PotentialSpec& V, const WaveField& u, const ProjectionOptions& opt) {
  const auto pq = polar_quadrature(opt.radial_nodes, opt.angular_nodes);
  const auto values = sample_grid(u, {pq.r.nodes, pq.u.nodes}, opt.exec);
  const auto v = sample_potential(V, pq);
  double full = 0.0;
  for (std::size_t q = 0; q < pq.r.size(); ++q)
    for (std::size_t l = 0; l < pq.u.size(); ++l)
      full += pq.r.weights[q] * pq.u.weights[l] * pq.r.nodes[q] *
              std::norm(v(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)) *
                        values(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)));
  if (full == 0.0) return 0.0;
  const auto M = potential_matrix(V, *u.basis, opt.radial_nodes, opt.angular_nodes, opt.exec);
  const double kept = (M * u.coeffs).squaredNorm();
  return std::max(0.0, 1.0 - kept / full);
}

}  // namespace diskq
