#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "kvnosc/errors.hpp"
#include "kvnosc/io.hpp"
#include "kvnosc/scenario.hpp"

using namespace kvnosc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kvnosc_unit_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Scenario parse(const std::string& text, Scenario base = {}) {
  std::istringstream in(text);
  return parse_scenario(in, base);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("shortest round-trip formatting") {
    CHECK(io::format_double(0.0) == "0");
    CHECK(io::format_double(-0.0) == "0");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.5) == "-2.5");
    CHECK(io::format_double(1e-300) == "1e-300");
    for (double v : {1.0 / 3.0, std::numbers::pi, 6.02214076e23, -1.2345678901234567e-7,
                     std::numeric_limits<double>::min(), std::numeric_limits<double>::max()}) {
      const std::string s = io::format_double(v);
      CHECK(std::stod(s) == v);
      std::size_t digits = 0;
      for (char c : s.substr(0, s.find('e'))) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
      CHECK(digits <= 17);
    }
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("CSV layout and round trip") {
    const io::Table t{"00ff00ff00ff00ff", {"t", "rho"}, {{0.0, 1.0}, {0.1, 1.0000000000000002}}};
    const std::string csv = io::to_csv(t);
    CHECK(csv == "# scenario_hash=00ff00ff00ff00ff\nt,rho\n0,1\n0.1,1.0000000000000002\n");
    const fs::path dir = temp_dir("csv");
    const fs::path p = io::write_table(dir, "x", t, io::Format::csv);
    CHECK(p.filename() == "x.csv");
    const io::Table back = io::read_csv(p);
    CHECK(back.scenario_hash == t.scenario_hash);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
  }

  TEST_CASE("JSON layout") {
    const io::Table t{"abc", {"a"}, {{1.5}, {std::numeric_limits<double>::quiet_NaN()}}};
    CHECK(io::to_json(t) == "{\"scenario_hash\":\"abc\",\"columns\":[\"a\"],\"rows\":[[1.5],[null]]}\n");
  }

  TEST_CASE("malformed CSV is rejected") {
    const fs::path dir = temp_dir("bad");
    io::write_text(dir / "width.csv", "a,b\n1,2\n3\n");
    io::write_text(dir / "num.csv", "a\nfoo\n");
    io::write_text(dir / "empty.csv", "");
    CHECK_THROWS_AS(io::read_csv(dir / "width.csv"), ConfigError);
    CHECK_THROWS_AS(io::read_csv(dir / "num.csv"), ConfigError);
    CHECK_THROWS_AS(io::read_csv(dir / "empty.csv"), ConfigError);
    CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), ConfigError);
  }
}

TEST_SUITE("scenario") {
  TEST_CASE("defaults") {
    const Scenario s;
    CHECK(s.rho0 == 1.0);
    CHECK(s.rho_dot0 == 0.0);
    CHECK(s.snapshot_times() == std::vector<double>{0.0, 5.0, 10.0});
    CHECK_NOTHROW(s.validate());
  }

  TEST_CASE("presets") {
    const Scenario f2 = preset("fig2");
    CHECK(f2.kind == "oscillatory");
    CHECK(f2.delta == 0.5);
    CHECK(f2.omega == 2.5);
    CHECK(f2.xc == 2.0);
    CHECK(f2.pc == 2.0);
    const Scenario f1 = preset("fig1");
    CHECK(f1.kind == "hyperbolic");
    CHECK(f1.xc == -3.0);
    CHECK(f1.pc == 3.0);
    CHECK(f1.beta_sweep == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(preset("constant").k0 == 1.0);
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
    CHECK_THROWS_AS(preset("fig3"), ConfigError);
  }

  TEST_CASE("fig1 expands into labelled runs with closed-form initial data") {
    const auto runs = preset("fig1").expand();
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].first == "beta_0.5");
    CHECK(runs[2].first == "beta_2");
    CHECK(runs[2].second.beta == 2.0);
    CHECK(runs[2].second.initial_data().rho0 == doctest::Approx(0.5));
    CHECK(runs[0].second.hash() != runs[1].second.hash());
    CHECK(preset("fig2").expand().size() == 1);
  }

  TEST_CASE("parser grammar") {
    const Scenario s = parse(R"(
# a comment
preset = constant
k0 = 2.5   # trailing comment
xc=-1
snapshots = 0, 1.5,3
adaptive = true
seed = 42
)");
    CHECK(s.preset == "constant");
    CHECK(s.kind == "constant");
    CHECK(s.k0 == 2.5);
    CHECK(s.xc == -1.0);
    CHECK(s.snapshots == std::vector<double>{0.0, 1.5, 3.0});
    CHECK(s.adaptive);
    CHECK(s.seed == 42);

    const Scenario t = parse("kind = tabulated\nknots = 0:1, 5:2.5, 10:0\n");
    REQUIRE(t.knots.size() == 3);
    CHECK(t.knots[1] == std::pair{5.0, 2.5});
    CHECK(t.profile().k(2.5) == doctest::Approx(1.75));
  }

  TEST_CASE("a preset line resets earlier settings") {
    const Scenario s = parse("xc = 9\npreset = fig2\n");
    CHECK(s.xc == 2.0);
  }

  TEST_CASE("explicit initial data overrides closed-form initial data") {
    const Scenario s = parse("preset = hyperbolic\nrho0 = 1\n");
    CHECK_FALSE(s.analytic_initial_data);
    CHECK(s.initial_data().rho0 == 1.0);
  }

  TEST_CASE("parser errors") {
    CHECK_THROWS_AS(parse("nonsense = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("k0 = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("k0 = 1.0x\n"), ConfigError);
    CHECK_THROWS_AS(parse("k0 = inf\n"), ConfigError);
    CHECK_THROWS_AS(parse("just text\n"), ConfigError);
    CHECK_THROWS_AS(parse("adaptive = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse("seed = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse("knots = 0:1, 2\n"), ConfigError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.txt"), ConfigError);
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(parse("rho0 = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("t_end = -1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("step = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("sigma_x = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("snapshots = 11\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("kind = wobbly\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("kind = hyperbolic\nbeta = -1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("preset = fig2\nanalytic_initial_data = true\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse("output_every = 0\n").validate(), ConfigError);
  }

  TEST_CASE("hash is stable and sensitive") {
    const Scenario a = preset("fig2");
    CHECK(a.hash().size() == 16);
    CHECK(a.hash() == preset("fig2").hash());
    Scenario b = a;
    b.xc = 2.0000000000000004;
    CHECK(a.hash() != b.hash());
    // Parameters of other profile kinds do not enter the hash.
    Scenario c = a;
    c.beta = 7.0;
    CHECK(a.hash() == c.hash());
    // The preset label is not part of the physics.
    Scenario d = a;
    d.preset = "custom";
    CHECK(a.hash() == d.hash());
    CHECK(a.canonical().find("delta = 0.5\n") != std::string::npos);
  }

  TEST_CASE("scenario files") {
    const fs::path dir = temp_dir("scenario");
    {
      std::ofstream f(dir / "s.txt");
      f << "preset = fig2\nt_end = 3\n";
    }
    const Scenario s = load_scenario_file(dir / "s.txt");
    CHECK(s.t_end == 3.0);
    CHECK(s.omega == 2.5);
  }
}
