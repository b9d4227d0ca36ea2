#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = DISKQ_CLI;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("diskq_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// key = value lines of a manifest (later sections win on duplicates).
std::map<std::string, std::string> manifest(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

}  // namespace

TEST_CASE("cli: help, version and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("--version") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("eigen --no-such-flag 1") == 2);
  CHECK(run("eigen --n notanumber") == 2);
}

TEST_CASE("cli: eigen writes the first zero and a density table") {
  const auto dir = scratch("eigen");
  REQUIRE(run("eigen --n 0 --k 1 --out " + dir.string()) == 0);
  const auto m = manifest(dir / "eigen_manifest.txt");
  CHECK(std::stod(m.at("zero")) == doctest::Approx(2.404825557695773).epsilon(1e-10));
  CHECK(m.at("version") == "0.1.0");
  for (const char* key : {"tol_geom", "tol_tangent", "tol_flow", "tol_quad", "seed"}) CHECK(m.count(key) == 1);
  const auto csv = slurp(dir / "eigen.csv");
  CHECK(csv.rfind("r,density\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
}

TEST_CASE("cli: billiard closes the triangle orbit") {
  const auto dir = scratch("billiard");
  REQUIRE(run("billiard --alpha0 1/6 --tau 6 --out " + dir.string()) == 0);
  const auto m = manifest(dir / "billiard_manifest.txt");
  CHECK(std::stod(m.at("closure_residual")) < 1e-9);
  CHECK(m.at("chord_count") == "3");
  CHECK(fs::file_size(dir / "billiard.csv") > 0);
}

TEST_CASE("cli: observe sweep reports a positive minimum") {
  const auto dir = scratch("observe");
  REQUIRE(run("observe --region \"r>0.8\" --family eigen:40 --T 1 --out " + dir.string()) == 0);
  const auto m = manifest(dir / "observe_manifest.txt");
  const double q = std::stod(m.at("min_quotient"));
  CHECK(q > 0.0);
  CHECK(q == doctest::Approx(0.029377156268816762).epsilon(0.01));
  CHECK(slurp(dir / "observe.csv").rfind("datum,kind,target,quotient\n", 0) == 0);
}

TEST_CASE("cli: config errors exit 2, validation failures exit 3") {
  const auto dir = scratch("errors");
  const std::string out = " --out " + dir.string();
  CHECK(run("billiard --alpha0 1/0" + out) == 2);
  CHECK(run("eigen --tol_geom -1" + out) == 2);
  CHECK(run("evolve --potential wobbly:3" + out) == 2);
  CHECK(run("observe --region \"r>2\"" + out) == 2);
  CHECK(run("eigen --config /nonexistent/diskq.toml" + out) == 2);
  // A self-convergence tolerance no quadrature can meet.
  CHECK(run("evolve --potential gaussian:0.2,0.1,0.3,2 --alpha_cut 8 --convergence_tol 1e-30" + out) == 3);
}

TEST_CASE("cli: config file and environment default for the output directory") {
  const auto dir = scratch("config");
  const auto cfg = dir / "run.toml";
  {
    std::ofstream f(cfg);
    f << "# pushforward of a coherent state\n"
      << "datum = \"coherent:-0.2,0.1,0.5,0.3,0.05\"\n"
      << "potential = \"gaussian:0,0,0.3,5\"\n"
      << "h = 0.05\n"
      << "times = [0, 0.5]\n"
      << "radial_nodes = 128\n"
      << "angular_nodes = 256\n";
  }
  const auto out = dir / "out";
  REQUIRE(run("pushforward --config " + cfg.string(), "DISKQ_OUT=" + out.string()) == 0);
  const auto m = manifest(out / "pushforward_manifest.txt");
  CHECK(m.at("datum") == "coherent:-0.2,0.1,0.5,0.3,0.05");
  CHECK(m.at("times") == "[0, 0.5]");
  CHECK(m.at("h") == "0.05");
  CHECK(m.at("potential_is_radial") == "true");
  CHECK(std::stod(m.at("j_marginal_max_change")) < 1e-12);

  // Command-line flags override the file.
  const auto out2 = dir / "out2";
  REQUIRE(run("pushforward --config " + cfg.string() + " --h 0.04 --out " + out2.string()) == 0);
  CHECK(manifest(out2 / "pushforward_manifest.txt").at("h") == "0.04");
}

TEST_CASE("cli: identical configurations give identical files") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run("selftest --out " + a.string()) == 0);
  REQUIRE(run("selftest --out " + b.string()) == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const auto other = b / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
  }
  CHECK(files >= 2);
  const auto m = manifest(a / "selftest_manifest.txt");
  CHECK(m.at("failed") == "0");
}
