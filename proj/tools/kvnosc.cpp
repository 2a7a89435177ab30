#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kvnosc/app.hpp"
#include "kvnosc/errors.hpp"
#include "kvnosc/io.hpp"
#include "kvnosc/scenario.hpp"

namespace {

struct CommonFlags {
  std::string scenario_path;
  std::string preset;
  std::string out = "out";
  std::optional<double> step;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario_path, "Scenario file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "Named preset: fig1, fig2, constant, hyperbolic, inverse_quadratic");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--step", f.step, "Integration step");
  cmd->add_option("--t-end", f.t_end, "Final time");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--set", f.settings, "Override one scenario key, key=value (repeatable)");
}

// Preset first, then the scenario file, then individual flags.
kvnosc::Scenario build_scenario(const CommonFlags& f) {
  kvnosc::Scenario s = f.preset.empty() ? kvnosc::Scenario{} : kvnosc::preset(f.preset);
  if (!f.scenario_path.empty()) s = kvnosc::load_scenario_file(f.scenario_path, s);
  for (const std::string& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw kvnosc::ConfigError("--set expects key=value, got '" + kv + "'");
    kvnosc::apply_setting(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.step) s.step = *f.step;
  if (f.t_end) s.t_end = *f.t_end;
  if (f.seed) s.seed = *f.seed;
  s.validate();
  return s;
}

kvnosc::OutputOptions output(const CommonFlags& f) {
  return {f.out, f.format == "json" ? kvnosc::io::Format::json : kvnosc::io::Format::csv};
}

void list_files(const kvnosc::RunResult& r) {
  for (const auto& p : r.files) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent oscillator in Koopman-von Neumann form: Ermakov solver, "
               "phase-space propagator and verification suite"};
  app.require_subcommand(1);

  CommonFlags solve_f, traj_f, evolve_f;
  auto* solve_cmd = app.add_subcommand("solve-ermakov", "Solve the Ermakov equation, write ermakov.csv");
  add_common(solve_cmd, solve_f);

  auto* traj_cmd = app.add_subcommand("trajectory", "Centre trajectory and its characteristics oracle");
  add_common(traj_cmd, traj_f);

  auto* evolve_cmd = app.add_subcommand("evolve", "Density grids at snapshot times");
  add_common(evolve_cmd, evolve_f);
  std::vector<double> snapshots;
  evolve_cmd->add_option("--snapshots", snapshots, "Snapshot times (default 0, t_end/2, t_end)")
      ->delimiter(',');

  auto* verify_cmd = app.add_subcommand("verify", "Run the identity suite or compare output files");
  std::string depth = "quick";
  std::string check_dir;
  std::string report_dir;
  bool json = false;
  verify_cmd->add_option("--depth", depth, "quick or full (adds Monte-Carlo checks)")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  verify_cmd->add_option("--check-dir", check_dir,
                         "Compare centre.csv with centre_oracle.csv in this directory");
  verify_cmd->add_option("--out", report_dir, "Also write verify_report.json here");
  verify_cmd->add_flag("--json", json, "Print the JSON report instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kvnosc::kExitOk : kvnosc::kExitConfigError;
  }

  try {
    if (solve_cmd->parsed()) {
      list_files(kvnosc::run_solve_ermakov(build_scenario(solve_f), output(solve_f)));
    } else if (traj_cmd->parsed()) {
      const auto r = kvnosc::run_trajectory(build_scenario(traj_f), output(traj_f));
      list_files(r);
      std::cout << "max centre/oracle discrepancy " << kvnosc::io::format_double(r.max_discrepancy)
                << '\n';
    } else if (evolve_cmd->parsed()) {
      kvnosc::Scenario s = build_scenario(evolve_f);
      if (!snapshots.empty()) {
        s.snapshots = snapshots;
        s.validate();
      }
      list_files(kvnosc::run_evolve(s, output(evolve_f)));
    } else if (verify_cmd->parsed()) {
      const kvnosc::Report report =
          check_dir.empty()
              ? kvnosc::run_verify(depth == "full" ? kvnosc::Depth::full : kvnosc::Depth::quick,
                                   report_dir)
              : kvnosc::compare_centre_files(check_dir);
      std::cout << (json ? report.to_json() : report.to_text());
      return report.all_passed() ? kvnosc::kExitOk : kvnosc::kExitVerificationFailed;
    }
  } catch (const kvnosc::RhoCollapse& e) {
    std::cerr << "kvnosc: numerical failure: " << e.what() << '\n';
    return kvnosc::kExitNumericalFailure;
  } catch (const kvnosc::Error& e) {
    std::cerr << "kvnosc: " << e.what() << '\n';
    return kvnosc::kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "kvnosc: " << e.what() << '\n';
    return kvnosc::kExitConfigError;
  }
  return kvnosc::kExitOk;
}
