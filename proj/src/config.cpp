#include "diskq/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace diskq {

namespace {

std::pair<std::string, std::vector<double>> split_descriptor(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, {}};
  std::vector<double> params;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse number '" + item + "' in '" + text + "'");
    }
  }
  return {text.substr(0, colon), params};
}

void need(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool is_int(double x) { return std::isfinite(x) && x == std::floor(x); }

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PotentialSpec parse_potential(const std::string& text) {
  const auto [kind, p] = split_descriptor(text);
  if (kind == "zero" && p.empty()) return PotentialSpec::zero();
  if (kind == "constant" && p.size() == 1) return PotentialSpec::constant_value(p[0]);
  if (kind == "radial_poly" && !p.empty()) return PotentialSpec::radial_polynomial(p);
  if (kind == "x_linear" && p.size() == 1) return PotentialSpec::x_linear(p[0]);
  if (kind == "gaussian" && p.size() == 4) {
    need(p[2] > 0.0, "gaussian potential: width must be positive");
    return PotentialSpec::gaussian_bump({p[0], p[1]}, p[2], p[3]);
  }
  throw ConfigError("unknown potential '" + text + "'");
}

double datum_alpha_cut(const std::string& text) {
  const auto [kind, p] = split_descriptor(text);
  if (kind == "coherent" && p.size() == 5 && p[4] > 0.0)
    return FamilySpec{"coherent", p}.alpha_cut();
  return 0.0;
}

WaveField parse_datum(const std::string& text, BasisPtr basis) {
  const auto [kind, p] = split_descriptor(text);
  if (kind == "mode" && p.size() == 3 && is_int(p[0]) && is_int(p[1]) && std::abs(p[2]) == 1.0) {
    if (!basis->index_of(static_cast<int>(p[0]), static_cast<int>(p[1]), static_cast<int>(p[2])))
      throw ConfigError("datum '" + text + "' lies outside the basis (raise alpha_cut)");
    return WaveField::mode(basis, static_cast<int>(p[0]), static_cast<int>(p[1]), static_cast<int>(p[2]));
  }
  if (kind == "coherent" && p.size() == 5) {
    need(p[4] > 0.0, "coherent datum: h must be positive");
    return coherent_state(basis, {p[0], p[1]}, {p[2], p[3]}, p[4]);
  }
  throw ConfigError("unknown datum '" + text + "'");
}

BoundaryArc parse_arc(const std::string& text) {
  const auto colon = text.find(':');
  need(colon != std::string::npos, "arc must read lo:len, got '" + text + "'");
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double len = std::stod(text.substr(colon + 1));
    need(len > 0.0, "arc length must be positive");
    return {lo, std::min(len, two_pi)};
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse arc '" + text + "'");
  }
}

void validate(const RunConfig& c) {
  need(c.threads >= 0, "threads must be >= 0");
  need(c.tol.geom > 0 && c.tol.tangent > 0 && c.tol.flow > 0 && c.tol.quad > 0, "tolerances must be positive");
  need(c.n >= 0 && c.k >= 1 && (c.sign == 1 || c.sign == -1), "eigen: need n >= 0, k >= 1, sign = +-1");
  need(c.alpha_cut > 0.0, "alpha_cut must be positive");
  need(c.radial_nodes >= 8 && c.angular_nodes >= 8, "quadrature node counts must be >= 8");
  need(c.convergence_tol > 0.0, "convergence_tol must be positive");
  need(c.samples >= 1, "samples must be >= 1");
  need(c.cutoff >= 0 && c.theta_points > 4 * c.cutoff, "floquet: need theta_points > 4 * cutoff");
  need(c.h > 0.0, "h must be positive");
  need(c.z_points >= 2 && c.xi_points >= 2 && c.xi_max > c.xi_min, "husimi grid is degenerate");
  need(!c.times.empty(), "times must be nonempty");
  need(c.q_max >= 1 && c.class_tol > 0.0, "decompose: need q_max >= 1 and class_tol > 0");
  need(c.T > 0.0, "T must be positive");
  need(c.time_quadrature == "spectral" || c.time_quadrature == "simpson",
       "time_quadrature must be spectral or simpson");
  try {
    RationalAngle::parse(c.alpha0);
    parse_potential(c.potential);
    for (const auto& r : c.regions) Region::parse(r);
    FamilySpec::parse(c.family);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& a : c.arcs) parse_arc(a);
  const auto [kind, p] = split_descriptor(c.datum);
  need((kind == "mode" && p.size() == 3) || (kind == "coherent" && p.size() == 5), "unknown datum '" + c.datum + "'");
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
  auto num = [](double x) { return format_number(x); };
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  auto join = [](const auto& items, auto fmt) {
    std::string s = "[";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + fmt(items[i]);
    return s + "]";
  };
  return {
      {"command", c.command},
      {"seed", std::to_string(c.seed)},
      {"threads", std::to_string(c.threads)},
      {"tol_geom", num(c.tol.geom)},
      {"tol_tangent", num(c.tol.tangent)},
      {"tol_flow", num(c.tol.flow)},
      {"tol_quad", num(c.tol.quad)},
      {"n", std::to_string(c.n)},
      {"k", std::to_string(c.k)},
      {"sign", std::to_string(c.sign)},
      {"alpha_cut", num(c.alpha_cut)},
      {"potential", c.potential},
      {"radial_nodes", std::to_string(c.radial_nodes)},
      {"angular_nodes", std::to_string(c.angular_nodes)},
      {"check_convergence", c.check_convergence ? "true" : "false"},
      {"convergence_tol", num(c.convergence_tol)},
      {"datum", c.datum},
      {"alpha0", c.alpha0},
      {"tau", num(c.tau)},
      {"theta", num(c.theta)},
      {"samples", std::to_string(c.samples)},
      {"omega", num(c.omega)},
      {"cutoff", std::to_string(c.cutoff)},
      {"theta_points", std::to_string(c.theta_points)},
      {"t", num(c.t)},
      {"h", num(c.h)},
      {"z_points", std::to_string(c.z_points)},
      {"xi_points", std::to_string(c.xi_points)},
      {"xi_min", num(c.xi_min)},
      {"xi_max", num(c.xi_max)},
      {"times", join(c.times, num)},
      {"q_max", std::to_string(c.q_max)},
      {"class_tol", num(c.class_tol)},
      {"family", c.family},
      {"region", join(c.regions, quote)},
      {"arc", join(c.arcs, quote)},
      {"T", num(c.T)},
      {"time_quadrature", c.time_quadrature},
  };
}

}  // namespace diskq
