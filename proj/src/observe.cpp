#include "diskq/observe.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include "diskq/bessel.hpp"
#include "diskq/quadrature.hpp"

namespace diskq {

// --------------------------------------------------------------- Regions

Region Region::annulus(double r_lo, double r_hi) { return sector(r_lo, r_hi, 0.0, two_pi); }

Region Region::sector(double r_lo, double r_hi, double u_lo, double u_len) {
  if (!(r_lo >= 0.0 && r_hi <= 1.0 && r_lo < r_hi)) throw InvalidArgument("Region: need 0 <= r_lo < r_hi <= 1");
  if (!(u_len > 0.0)) throw InvalidArgument("Region: empty angular interval");
  return {r_lo, r_hi, u_lo, std::min(u_len, two_pi)};
}

Region Region::parse(const std::string& text) {
  std::string radial = text;
  double u_lo = 0.0;
  double u_len = two_pi;
  if (const auto semi = text.find(';'); semi != std::string::npos) {
    radial = text.substr(0, semi);
    const std::string ang = text.substr(semi + 1);
    const auto colon = ang.find(':');
    if (ang.rfind("u=", 0) != 0 || colon == std::string::npos)
      throw InvalidArgument("Region: angular part must read u=lo:len");
    u_lo = std::stod(ang.substr(2, colon - 2));
    u_len = std::stod(ang.substr(colon + 1));
  }
  try {
    if (radial == "disk") return sector(0.0, 1.0, u_lo, u_len);
    if (radial.rfind("r>", 0) == 0) return sector(std::stod(radial.substr(2)), 1.0, u_lo, u_len);
    if (radial.rfind("r<", 0) == 0) return sector(0.0, std::stod(radial.substr(2)), u_lo, u_len);
    if (const auto p = radial.find("<r<"); p != std::string::npos)
      return sector(std::stod(radial.substr(0, p)), std::stod(radial.substr(p + 3)), u_lo, u_len);
  } catch (const std::logic_error&) {
    throw InvalidArgument("Region: cannot parse '" + text + "'");
  }
  throw InvalidArgument("Region: cannot parse '" + text + "'");
}

std::string Region::str() const {
  std::ostringstream os;
  os.precision(12);
  if (r_lo == 0.0 && r_hi == 1.0) os << "disk";
  else if (r_lo == 0.0) os << "r<" << r_hi;
  else if (r_hi == 1.0) os << "r>" << r_lo;
  else os << r_lo << "<r<" << r_hi;
  if (!full_circle()) os << ";u=" << u_lo << ":" << u_len;
  return os.str();
}

Region Region::rotated(double beta) const { return {r_lo, r_hi, u_lo + beta, u_len}; }

// ---------------------------------------------------------- Gram blocks

namespace {

// int_{u_lo}^{u_lo + len} e^{i d u} du.
cplx arc_integral(int d, double u_lo, double len) {
  if (d == 0) return len;
  if (len >= two_pi) return 0.0;
  const double a = d * u_lo;
  const double b = d * (u_lo + len);
  return (std::polar(1.0, b) - std::polar(1.0, a)) / cplx(0.0, static_cast<double>(d));
}

using GramFn = std::function<Eigen::MatrixXcd(const std::vector<int>&)>;

GramFn region_gram_fn(const Basis& basis, const Region& region) {
  const double width = std::min(0.05, 2.0 / std::max(1.0, basis.alpha_max()));
  auto rule = std::make_shared<QuadratureRule>(panelled_gauss_legendre(region.r_lo, region.r_hi, width, 16));
  return [&basis, region, rule](const std::vector<int>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    std::vector<Eigenmode> modes;
    for (int i : idx) modes.push_back(basis[static_cast<std::size_t>(i)]);
    const auto table = kernels::radial_table(modes, rule->nodes, Exec::serial);
    Eigen::VectorXd w(static_cast<Eigen::Index>(rule->size()));
    for (std::size_t q = 0; q < rule->size(); ++q) w[static_cast<Eigen::Index>(q)] = rule->weights[q] * rule->nodes[q];
    const Eigen::MatrixXd R = table * w.asDiagonal() * table.transpose();
    Eigen::MatrixXcd G(n, n);
    const auto& ang = basis.angular();
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const int d = ang[static_cast<std::size_t>(idx[b])] - ang[static_cast<std::size_t>(idx[a])];
        G(a, b) = R(a, b) * arc_integral(d, region.u_lo, region.u_len);
      }
    return G;
  };
}

GramFn boundary_gram_fn(const Basis& basis, const BoundaryArc& arc) {
  auto tau = std::make_shared<Eigen::VectorXd>(trace_coefficients(basis));
  return [&basis, arc, tau](const std::vector<int>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd G(n, n);
    const auto& ang = basis.angular();
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const int d = ang[static_cast<std::size_t>(idx[b])] - ang[static_cast<std::size_t>(idx[a])];
        G(a, b) = (*tau)[idx[a]] * (*tau)[idx[b]] * arc_integral(d, arc.u_lo, arc.u_len);
      }
    return G;
  };
}

// int_0^T e^{i delta t} dt without cancellation for small delta.
cplx time_weight(double delta, double T) {
  if (delta == 0.0) return T;
  const double s = std::sin(0.5 * delta * T);
  return {std::sin(delta * T) / delta, 2.0 * s * s / delta};
}

struct Group {
  std::vector<int> indices;
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  bool identity = true;
};

// Groups of basis indices invariant under both the propagator and the
// quadratic form.
std::vector<Group> coupled_groups(const Propagator& prop, bool form_keeps_m) {
  std::vector<Group> groups;
  if (form_keeps_m && prop.angular_blocks()) {
    for (const auto& b : prop.blocks()) groups.push_back({b.indices, b.energies, b.vectors, b.identity});
    return groups;
  }
  Group all;
  const auto K = static_cast<Eigen::Index>(prop.basis()->size());
  all.energies.resize(K);
  all.vectors = Eigen::MatrixXcd::Zero(K, K);
  all.identity = true;
  Eigen::Index pos = 0;
  for (const auto& b : prop.blocks()) {
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    for (int i : b.indices) all.indices.push_back(i);
    all.energies.segment(pos, n) = b.energies;
    all.vectors.block(pos, pos, n, n) = b.vectors;
    all.identity = all.identity && b.identity;
    pos += n;
  }
  groups.push_back(std::move(all));
  return groups;
}

Eigen::VectorXcd restrict(const Eigen::VectorXcd& c, const std::vector<int>& idx) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out[static_cast<Eigen::Index>(a)] = c[idx[a]];
  return out;
}

double spectral_integral(const Eigen::VectorXcd& c, const std::vector<Group>& groups, const GramFn& gram, double T) {
  double total = 0.0;
  for (const auto& g : groups) {
    const Eigen::VectorXcd cs = restrict(c, g.indices);
    if (cs.squaredNorm() == 0.0) continue;
    const Eigen::MatrixXcd G = gram(g.indices);
    const Eigen::VectorXcd w = g.identity ? cs : Eigen::VectorXcd(g.vectors.adjoint() * cs);
    const Eigen::MatrixXcd Gt = g.identity ? G : Eigen::MatrixXcd(g.vectors.adjoint() * G * g.vectors);
    const auto n = w.size();
    cplx acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (w[k] == cplx(0.0)) continue;
      for (Eigen::Index l = 0; l < n; ++l) {
        if (w[l] == cplx(0.0)) continue;
        acc += std::conj(w[k]) * w[l] * Gt(k, l) * time_weight(g.energies[k] - g.energies[l], T);
      }
    }
    total += acc.real();
  }
  return total;
}

double simpson_integral(const Eigen::VectorXcd& c, const Propagator& prop, const std::vector<Group>& groups,
                        const GramFn& gram, double T, int n) {
  std::vector<Eigen::MatrixXcd> forms;
  std::vector<const Group*> active;
  for (const auto& g : groups) {
    if (restrict(c, g.indices).squaredNorm() == 0.0) continue;
    active.push_back(&g);
    forms.push_back(gram(g.indices));
  }
  const auto w = simpson_weights(n, 0.0, T);
  double acc = 0.0;
  for (int s = 0; s <= n; ++s) {
    const Eigen::VectorXcd ct = prop.apply(c, T * s / n);
    double value = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Eigen::VectorXcd cs = restrict(ct, active[a]->indices);
      value += cs.dot(forms[a] * cs).real();
    }
    acc += w[static_cast<std::size_t>(s)] * value;
  }
  return acc;
}

double time_integral(const WaveField& u0, const Propagator& prop, const GramFn& gram, bool form_keeps_m, double T,
                     const ObserveOptions& opt) {
  if (u0.basis != prop.basis()) throw InvalidArgument("observe: datum basis differs from the propagator's");
  if (!(T > 0.0)) throw InvalidArgument("observe: T must be positive");
  const auto groups = coupled_groups(prop, form_keeps_m);
  if (opt.time == TimeQuadrature::spectral) return spectral_integral(u0.coeffs, groups, gram, T);
  const double a = u0.basis->alpha_max();
  const double want = std::ceil(8.0 * T * a * a);
  int n = static_cast<int>(std::clamp(want, static_cast<double>(opt.min_snapshots),
                                      static_cast<double>(opt.max_snapshots)));
  n += n % 2;
  const double fine = simpson_integral(u0.coeffs, prop, groups, gram, T, n);
  const int half = n / 2 + (n / 2) % 2;
  const double coarse = simpson_integral(u0.coeffs, prop, groups, gram, T, half);
  if (std::abs(fine - coarse) > opt.richardson_tol * std::max(std::abs(fine), 1e-300) && fine != 0.0) {
    std::ostringstream os;
    os << "observe: Simpson time quadrature unresolved (" << n << " vs " << half << " snapshots differ by "
       << std::abs(fine - coarse) << ")";
    throw QuadratureUnderResolved(os.str());
  }
  return fine;
}

}  // namespace

Eigen::MatrixXcd region_gram(const Basis& basis, const Region& region) {
  std::vector<int> all(basis.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return region_gram_fn(basis, region)(all);
}

Eigen::MatrixXcd boundary_gram(const Basis& basis, const BoundaryArc& arc) {
  std::vector<int> all(basis.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return boundary_gram_fn(basis, arc)(all);
}

double interior_quotient(const WaveField& u0, const Propagator& prop, const Region& region, double T,
                         const ObserveOptions& opt) {
  const double mass = u0.coeffs.squaredNorm();
  if (mass == 0.0) throw ZeroDatum("interior_quotient: zero initial datum");
  const auto gram = region_gram_fn(*u0.basis, region);
  return time_integral(u0, prop, gram, region.full_circle(), T, opt) / (T * mass);
}

double boundary_quotient(const WaveField& u0, const Propagator& prop, const BoundaryArc& arc, double T,
                         const ObserveOptions& opt) {
  const double h1 = u0.h1_norm_squared();
  if (h1 == 0.0) throw ZeroDatum("boundary_quotient: zero initial datum");
  const auto gram = boundary_gram_fn(*u0.basis, arc);
  return time_integral(u0, prop, gram, arc.full_circle(), T, opt) / h1;
}

// -------------------------------------------------------------- Families

FamilySpec FamilySpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("family: expected kind:params, got '" + text + "'");
  FamilySpec f;
  f.kind = text.substr(0, colon);
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  try {
    while (std::getline(ss, item, ',')) f.params.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw InvalidArgument("family: cannot parse parameters of '" + text + "'");
  }
  const bool ok = (f.kind == "eigen" && f.params.size() == 1) || (f.kind == "beats" && f.params.size() == 1) ||
                  (f.kind == "whisper" && !f.params.empty()) || (f.kind == "coherent" && f.params.size() == 5);
  if (!ok) throw InvalidArgument("family: unknown kind or wrong parameter count in '" + text + "'");
  if (f.kind == "whisper")
    for (double n : f.params)
      if (n < 0 || n != std::floor(n)) throw InvalidArgument("family: whisper orders must be integers >= 0");
  if (f.kind == "coherent" && !(f.params[4] > 0.0)) throw InvalidArgument("family: coherent h must be positive");
  return f;
}

std::string FamilySpec::str() const {
  std::ostringstream os;
  os.precision(12);
  os << kind << ":";
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  return os.str();
}

double FamilySpec::alpha_cut() const {
  if (kind == "eigen" || kind == "beats") return params[0];
  if (kind == "whisper") {
    double a = 0.0;
    for (double n : params) a = std::max(a, bessel_zero(static_cast<int>(n), 1));
    return a * (1.0 + 1e-12);
  }
  const double h = params[4];
  return std::hypot(params[2], params[3]) / h + 6.0 / std::sqrt(2.0 * h) + 10.0;
}

std::vector<FamilyMember> build_family(const FamilySpec& spec, BasisPtr basis) {
  std::vector<FamilyMember> out;
  auto label = [](const Eigenmode& m) {
    return "psi(" + std::to_string(m.n) + "," + std::to_string(m.k) + "," + (m.sign > 0 ? "+" : "-") + ")";
  };
  if (spec.kind == "eigen") {
    for (std::size_t i = 0; i < basis->size(); ++i) {
      const auto& m = (*basis)[i];
      if (m.zero > spec.params[0]) continue;
      out.push_back({label(m), WaveField::mode(basis, m.n, m.k, m.sign)});
    }
  } else if (spec.kind == "whisper") {
    for (double n : spec.params) {
      const int ni = static_cast<int>(n);
      out.push_back({"psi(" + std::to_string(ni) + ",1,+)", WaveField::mode(basis, ni, 1, 1)});
    }
  } else if (spec.kind == "beats") {
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i + 1 < basis->size(); ++i) {
      const auto& a = (*basis)[i];
      if (a.zero > spec.params[0]) break;
      std::size_t j = i + 1;
      while (j < basis->size() && (*basis)[j].zero == a.zero) ++j;
      if (j >= basis->size() || (*basis)[j].zero > spec.params[0]) continue;
      auto u = WaveField::zero(basis);
      u.coeffs[static_cast<Eigen::Index>(i)] = s;
      u.coeffs[static_cast<Eigen::Index>(j)] = s;
      out.push_back({label(a) + "+" + label((*basis)[j]), u});
    }
  } else if (spec.kind == "coherent") {
    const Vec2 z0{spec.params[0], spec.params[1]};
    const Vec2 xi0{spec.params[2], spec.params[3]};
    out.push_back({spec.str(), coherent_state(basis, z0, xi0, spec.params[4])});
  } else {
    throw InvalidArgument("family: unknown kind '" + spec.kind + "'");
  }
  return out;
}

double ObservabilityReport::min_quotient() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [r, v] : minima) m = std::min(m, v);
  return m;
}

ObservabilityReport sweep(const FamilySpec& family, const std::vector<Region>& regions, double T,
                          const PotentialSpec& V, const HamiltonianOptions& hopt, const ObserveOptions& opt) {
  ObservabilityReport rep;
  rep.family = family.str();
  rep.potential = V.descriptor;
  rep.T = T;
  if (regions.empty()) return rep;
  const auto basis = Basis::up_to(family.alpha_cut());
  const auto H = assemble_hamiltonian(V, basis, hopt);
  const Propagator prop(H);
  const auto members = build_family(family, basis);
  if (members.empty()) throw InvalidArgument("sweep: empty family");

  const int nm = static_cast<int>(members.size());
  const int nr = static_cast<int>(regions.size());
  std::vector<double> q(static_cast<std::size_t>(nm) * nr);
  std::exception_ptr failure;
  const bool par = opt.exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int p = 0; p < nm * nr; ++p) {
    try {
      q[p] = interior_quotient(members[p / nr].datum, prop, regions[p % nr], T, opt);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int r = 0; r < nr; ++r) {
    double m = std::numeric_limits<double>::infinity();
    for (int d = 0; d < nm; ++d) {
      const double v = q[static_cast<std::size_t>(d) * nr + r];
      rep.rows.push_back({members[d].label, regions[r].str(), v});
      m = std::min(m, v);
    }
    rep.minima.emplace_back(regions[r].str(), m);
  }
  return rep;
}

}  // namespace diskq
