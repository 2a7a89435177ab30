#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "kvnosc/freq.hpp"
#include "kvnosc/io.hpp"

#ifndef KVNOSC_CLI_PATH
#error "KVNOSC_CLI_PATH must point at the kvnosc binary"
#endif

using namespace kvnosc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kvnosc_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + KVNOSC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve-ermakov on fig2 gives a monotone phase") {
    const fs::path d = scratch("fig2");
    REQUIRE(run("solve-ermakov --preset fig2 --out " + d.string()) == 0);
    const io::Table t = io::read_csv(d / "ermakov.csv");
    CHECK(t.columns == std::vector<std::string>{"t", "rho", "rho_dot", "omega_rho"});
    CHECK(t.rows.size() == 1001);
    CHECK(t.rows.back()[0] == 10.0);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][3] >= t.rows[i - 1][3]);
    CHECK(fs::exists(d / "manifest_solve_ermakov.json"));
  }

  TEST_CASE("constant preset stays at rho = 1") {
    const fs::path d = scratch("constant");
    REQUIRE(run("solve-ermakov --preset constant --out " + d.string()) == 0);
    const io::Table t = io::read_csv(d / "ermakov.csv");
    for (const auto& r : t.rows) CHECK(r[1] == 1.0);
  }

  TEST_CASE("hyperbolic preset follows the closed form") {
    const fs::path d = scratch("hyperbolic");
    REQUIRE(run("solve-ermakov --preset hyperbolic --set output_every=1 --out " + d.string()) == 0);
    const io::Table t = io::read_csv(d / "ermakov.csv");
    const auto prof = FrequencyProfile::hyperbolic(1.0);
    REQUIRE(t.rows.size() == 10001);
    double err = 0;
    for (const auto& r : t.rows) err = std::max(err, std::abs(r[1] - analytic_rho(prof, r[0]).rho));
    CHECK(err < 1e-6);
  }

  TEST_CASE("trajectory writes both tracks and they agree") {
    const fs::path d = scratch("traj");
    REQUIRE(run("trajectory --preset fig2 --out " + d.string()) == 0);
    const io::Table c = io::read_csv(d / "centre.csv");
    const io::Table o = io::read_csv(d / "centre_oracle.csv");
    CHECK(c.columns == std::vector<std::string>{"t", "x_c", "p_c"});
    CHECK(o.columns == std::vector<std::string>{"t", "x", "p"});
    CHECK(c.scenario_hash == o.scenario_hash);
    REQUIRE(c.rows.size() == o.rows.size());
    for (std::size_t i = 0; i < c.rows.size(); i += 50)
      CHECK(std::hypot(c.rows[i][1] - o.rows[i][1], c.rows[i][2] - o.rows[i][2]) < 1e-6);
    const auto manifest = nlohmann::json::parse(slurp(d / "manifest_trajectory.json"));
    CHECK(manifest["max_discrepancy"].get<double>() < 1e-6);
    CHECK(manifest["scenario_hash"] == c.scenario_hash);
    CHECK(run("verify --check-dir " + d.string()) == 0);
  }

  TEST_CASE("fig1 expands into per-beta directories") {
    const fs::path d = scratch("fig1");
    REQUIRE(run("trajectory --preset fig1 --t-end 2 --out " + d.string()) == 0);
    for (const char* b : {"beta_0.5", "beta_1", "beta_2"}) CHECK(fs::exists(d / b / "centre.csv"));
    CHECK(run("verify --check-dir " + d.string()) == 0);
  }

  TEST_CASE("zero-length run writes the initial row") {
    const fs::path d = scratch("zero");
    REQUIRE(run("trajectory --preset fig2 --t-end 0 --out " + d.string()) == 0);
    const io::Table c = io::read_csv(d / "centre.csv");
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0] == std::vector<double>{0.0, 2.0, 2.0});
  }

  TEST_CASE("identical inputs give byte-identical outputs") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run("trajectory --preset fig2 --out " + a.string()) == 0);
    REQUIRE(run("trajectory --preset fig2 --out " + b.string()) == 0);
    CHECK(slurp(a / "centre.csv") == slurp(b / "centre.csv"));
    CHECK(slurp(a / "centre_oracle.csv") == slurp(b / "centre_oracle.csv"));
  }

  TEST_CASE("evolve writes grids with metadata") {
    const fs::path d = scratch("evolve");
    REQUIRE(run("evolve --preset constant --snapshots 0,1.5707963267948966 --set grid_n=120 --out " + d.string()) ==
            0);
    const io::Table g = io::read_csv(d / "density_t1.5707963267948966.csv");
    CHECK(g.columns == std::vector<std::string>{"x", "p", "gamma"});
    REQUIRE(g.rows.size() == 120 * 120);
    const auto* best = &g.rows[0];
    for (const auto& r : g.rows)
      if (r[2] > (*best)[2]) best = &r;
    const auto meta = nlohmann::json::parse(slurp(d / "density_t1.5707963267948966.json"));
    const double cell = (meta["window"]["x_max"].get<double>() - meta["window"]["x_min"].get<double>()) / 120;
    CHECK(std::abs((*best)[0] - 3.0) <= cell);
    CHECK(std::abs((*best)[1] - 3.0) <= cell);
    CHECK(std::abs(meta["mass"].get<double>() - 1.0) < 1e-6);
    CHECK(fs::exists(d / "density_t0.csv"));
  }

  TEST_CASE("json output format") {
    const fs::path d = scratch("json");
    REQUIRE(run("solve-ermakov --preset fig2 --t-end 1 --format json --out " + d.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(d / "ermakov.json"));
    CHECK(j["columns"].size() == 4);
    CHECK(j["rows"].size() == 101);
  }

  TEST_CASE("scenario files and overrides") {
    const fs::path d = scratch("file");
    io::write_text(d / "s.txt", "preset = fig2\nt_end = 2\n");
    REQUIRE(run("solve-ermakov --scenario " + (d / "s.txt").string() + " --step 0.01 --out " + d.string()) == 0);
    const io::Table t = io::read_csv(d / "ermakov.csv");
    CHECK(t.rows.size() == 21);
    CHECK(t.rows.back()[0] == 2.0);
  }

  TEST_CASE("exit codes") {
    const fs::path d = scratch("codes");
    CHECK(run("solve-ermakov --set kind=wobbly --out " + d.string()) == 2);
    CHECK(run("solve-ermakov --set nonsense=1 --out " + d.string()) == 2);
    CHECK(run("solve-ermakov --step -1 --out " + d.string()) == 2);
    CHECK(run("solve-ermakov --scenario /nonexistent --out " + d.string()) == 2);
    CHECK(run("bogus-command") == 2);
    CHECK(run("--help") == 0);
    // Strong inward velocity from a tiny rho collapses within the first step.
    CHECK(run("solve-ermakov --preset constant --set rho0=0.001 --set rho_dot0=-1 --step 0.01 --out " + d.string()) ==
          3);
  }

  TEST_CASE("check-dir rejects mismatched scenario hashes") {
    const fs::path d = scratch("tamper");
    REQUIRE(run("trajectory --preset fig2 --t-end 1 --out " + d.string()) == 0);
    std::string text = slurp(d / "centre_oracle.csv");
    text.replace(text.find('=') + 1, 16, "0000000000000000");
    io::write_text(d / "centre_oracle.csv", text);
    CHECK(run("verify --check-dir " + d.string()) == 2);
  }

  TEST_CASE("verify quick succeeds and writes a report") {
    const fs::path d = scratch("verify");
    CHECK(run("verify --depth quick --out " + d.string()) == 0);
    const auto j = nlohmann::json::parse(slurp(d / "verify_report.json"));
    CHECK(j["all_passed"] == true);
  }
}
