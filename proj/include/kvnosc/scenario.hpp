#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kvnosc/ermakov.hpp"
#include "kvnosc/freq.hpp"
#include "kvnosc/propagator.hpp"

namespace kvnosc {

/// One batch run: profile, Ermakov initial data, initial density, controls.
///
/// Text form is one `key = value` per line, `#` starts a comment, lists are
/// comma separated and tabulated knots are written `t:k, t:k, ...`. A
/// `preset = <name>` line resets every field to that preset; later lines
/// override it.
struct Scenario {
  std::string preset = "custom";

  std::string kind = "oscillatory";
  double beta = 1.0;
  std::vector<double> beta_sweep;  // hyperbolic only; one run per value
  double gamma = 1.0;
  double delta = 0.5;
  double omega = 2.5;
  double k0 = 1.0;
  std::vector<std::pair<double, double>> knots;

  double rho0 = 1.0;
  double rho_dot0 = 0.0;
  // Take (rho0, rho_dot0) from the closed form at t = 0 when one exists.
  bool analytic_initial_data = false;

  double xc = 2.0;
  double pc = 2.0;
  double sigma_x = 0.5;
  double sigma_p = 0.5;

  double t_end = 10.0;
  double step = 1e-3;
  bool adaptive = false;
  std::uint64_t seed = 1;
  std::size_t output_every = 10;
  // 0: max(256, resolving_grid_size) per snapshot.
  std::size_t grid_n = 0;
  double grid_widths = 6.0;
  std::vector<double> snapshots;  // empty: 0, t_end/2, t_end
  std::size_t n_samples = 4000;

  FrequencyProfile profile() const;
  InitialData initial_data() const;
  SolverOptions solver_options() const;
  GaussianState initial_state() const { return {xc, pc, sigma_x, sigma_p}; }
  std::vector<double> snapshot_times() const;

  // Fixed-order key = value text; the hash is computed from this.
  std::string canonical() const;
  // 16 hex digits, FNV-1a 64 of canonical().
  std::string hash() const;

  // One scenario per beta_sweep entry (labelled), or just this one.
  std::vector<std::pair<std::string, Scenario>> expand() const;

  // Throws ConfigError on non-finite or out-of-range fields.
  void validate() const;
};

/// Named presets: fig1, fig2, constant, hyperbolic, inverse_quadratic.
Scenario preset(std::string_view name);
std::vector<std::string> preset_names();

/// Apply one setting. Throws ConfigError on an unknown key or bad value.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);

Scenario parse_scenario(std::istream& in, Scenario base = {});
Scenario load_scenario_file(const std::filesystem::path& path, Scenario base = {});

}  // namespace kvnosc
