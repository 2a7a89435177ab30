#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kvnosc/io.hpp"
#include "kvnosc/scenario.hpp"
#include "kvnosc/verify.hpp"

namespace kvnosc {

// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

struct OutputOptions {
  std::filesystem::path dir = "out";
  io::Format format = io::Format::csv;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
  // run_trajectory: largest centre / oracle distance over all runs.
  double max_discrepancy = 0.0;
};

/// Every subcommand expands a beta sweep into `beta_<value>/` subdirectories;
/// otherwise files go straight into the output directory. Each run directory
/// gets a manifest_<command>.json with the scenario echo and wall time.

// ermakov.csv: t,rho,rho_dot,omega_rho (every output_every-th knot plus the last).
RunResult run_solve_ermakov(const Scenario& scenario, const OutputOptions& out);

// centre.csv (t,x_c,p_c) from the eta map, centre_oracle.csv (t,x,p) from characteristics.
RunResult run_trajectory(const Scenario& scenario, const OutputOptions& out);

// density_t<stamp>.csv (x,p,gamma) plus density_t<stamp>.json grid metadata per snapshot.
RunResult run_evolve(const Scenario& scenario, const OutputOptions& out);

// Writes verify_report.json into out.dir when non-empty.
Report run_verify(Depth depth, const std::filesystem::path& out_dir = {});

// Snapshot stamp used in density file names, e.g. 2.5 -> "2.5".
std::string snapshot_stamp(double t);

}  // namespace kvnosc
