// diskq: command-line front end. Every option may also be given in a config
// file (--config) as `key = value` lines; see README.md.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "diskq/commands.hpp"

using namespace diskq;

namespace {

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--out", c.out_dir, "Output directory")->envname("DISKQ_OUT");
  app.add_option("--threads", c.threads, "Worker threads (0 = runtime default)");
  app.add_option("--seed", c.seed, "Seed for randomized data");
  app.add_option("--tol_geom", c.tol.geom, "Boundary / unit-speed tolerance");
  app.add_option("--tol_tangent", c.tol.tangent, "Gliding-ray tolerance");
  app.add_option("--tol_flow", c.tol.flow, "Flow bookkeeping tolerance");
  app.add_option("--tol_quad", c.tol.quad, "Quadrature tolerance");

  app.add_option("--n", c.n, "Angular order of the eigenmode");
  app.add_option("--k", c.k, "Radial index of the eigenmode");
  app.add_option("--sign", c.sign, "Sign of the angular number (+1 or -1)");

  app.add_option("--alpha_cut", c.alpha_cut, "Basis cutoff on alpha = sqrt(eigenvalue)");
  app.add_option("--potential", c.potential, "zero | constant:c | radial_poly:c0,c1,.. | x_linear:s | gaussian:cx,cy,w,a");
  app.add_option("--radial_nodes", c.radial_nodes, "Radial Gauss-Legendre nodes for matrix elements");
  app.add_option("--angular_nodes", c.angular_nodes, "Angular trapezoid nodes for matrix elements");
  app.add_option("--check_convergence", c.check_convergence, "Verify matrix elements on a doubled grid");
  app.add_option("--convergence_tol", c.convergence_tol, "Relative tolerance of the doubling check");
  app.add_option("--datum", c.datum, "mode:n,k,sign | coherent:x,y,px,py,h");

  app.add_option("--alpha0", c.alpha0, "Rational incidence angle p/q (times pi)");
  app.add_option("--tau", c.tau, "Flow time");
  app.add_option("--theta", c.theta, "Angle coordinate of the starting point");
  app.add_option("--samples", c.samples, "Trajectory samples");
  app.add_option("--omega", c.omega, "Floquet parameter");
  app.add_option("--cutoff", c.cutoff, "Floquet Fourier cutoff M");
  app.add_option("--theta_points", c.theta_points, "Theta grid of orbit averages");
  app.add_option("--t", c.t, "Evaluation time");

  app.add_option("--h", c.h, "Semiclassical scale");
  app.add_option("--z_points", c.z_points, "Husimi position points per axis");
  app.add_option("--xi_points", c.xi_points, "Husimi momentum points per axis");
  app.add_option("--xi_min", c.xi_min, "Husimi momentum window");
  app.add_option("--xi_max", c.xi_max, "Husimi momentum window");
  app.add_option("--times", c.times, "Comma-separated output times")->delimiter(',');
  app.add_option("--q_max", c.q_max, "Largest denominator of rational angles");
  app.add_option("--class_tol", c.class_tol, "Rational classification tolerance");

  app.add_option("--family", c.family, "eigen:A | whisper:n1,n2,.. | beats:A | coherent:x,y,px,py,h");
  app.add_option("--region", c.regions, "Observation region (repeatable)");
  app.add_option("--arc", c.arcs, "Boundary arc lo:len (repeatable)");
  app.add_option("--T", c.T, "Observation time");
  app.add_option("--time_quadrature", c.time_quadrature, "spectral | simpson");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Quantum billiard in the unit disk: dynamics, spectra, phase-space measures, observability"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", version);
  app.set_config("--config", "", "Config file of key = value lines");
  add_options(app, cfg);
  app.fallthrough();
  app.require_subcommand(1);
  for (const auto& name : command_names()) app.add_subcommand(name, "Run " + name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const OutOfRange& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
