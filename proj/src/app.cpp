#include "kvnosc/app.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "kvnosc/ermakov.hpp"
#include "kvnosc/oracle.hpp"
#include "kvnosc/propagator.hpp"

namespace kvnosc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

// Knot indices 0, stride, 2*stride, ... and always the last knot.
std::vector<std::size_t> output_indices(std::size_t size, std::size_t stride) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < size; i += stride) idx.push_back(i);
  if (idx.back() != size - 1) idx.push_back(size - 1);
  return idx;
}

ordered_json scenario_echo(const Scenario& s) {
  ordered_json j;
  std::istringstream in(s.canonical());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

ordered_json solver_echo(const Scenario& s, const ErmakovSolution& sol) {
  ordered_json j;
  j["method"] = s.adaptive ? "dopri5" : "rk4";
  j["requested_step"] = s.step;
  j["grid_step"] = sol.step();
  j["knots"] = sol.size();
  if (s.adaptive) {
    const SolverOptions o = s.solver_options();
    j["abs_tol"] = o.abs_tol;
    j["rel_tol"] = o.rel_tol;
  }
  return j;
}

void write_manifest(const fs::path& dir, const std::string& command, const Scenario& s,
                    ordered_json extra, double wall_seconds, const std::vector<fs::path>& files) {
  ordered_json j;
  j["command"] = command;
  j["scenario_hash"] = s.hash();
  j["preset"] = s.preset;
  j["scenario"] = scenario_echo(s);
  for (auto& [k, v] : extra.items()) j[k] = v;
  ordered_json names = ordered_json::array();
  for (const fs::path& f : files) names.push_back(f.filename().string());
  j["files"] = names;
  j["wall_seconds"] = wall_seconds;
  fs::create_directories(dir);
  io::write_text(dir / ("manifest_" + command + ".json"), j.dump(2) + "\n");
}

ErmakovSolution solve_scenario(const Scenario& s) {
  return solve(s.profile(), s.initial_data(), s.t_end, s.solver_options());
}

template <class F>
RunResult for_each_run(const Scenario& scenario, const OutputOptions& out, F&& run_one) {
  scenario.validate();
  RunResult total;
  for (const auto& [label, s] : scenario.expand()) {
    const fs::path dir = label.empty() ? out.dir : out.dir / label;
    RunResult r = run_one(s, dir);
    total.files.insert(total.files.end(), r.files.begin(), r.files.end());
    total.max_discrepancy = std::max(total.max_discrepancy, r.max_discrepancy);
  }
  return total;
}

}  // namespace

std::string snapshot_stamp(double t) { return io::format_double(t); }

RunResult run_solve_ermakov(const Scenario& scenario, const OutputOptions& out) {
  return for_each_run(scenario, out, [&](const Scenario& s, const fs::path& dir) {
    const auto start = Clock::now();
    const ErmakovSolution sol = solve_scenario(s);
    io::Table table{s.hash(), {"t", "rho", "rho_dot", "omega_rho"}, {}};
    for (std::size_t i : output_indices(sol.size(), s.output_every)) {
      const ErmakovState& st = sol.samples()[i];
      table.rows.push_back({sol.grid()[i], st.rho, st.rho_dot, st.omega_rho});
    }
    RunResult r;
    r.files.push_back(io::write_table(dir, "ermakov", table, out.format));
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    write_manifest(dir, "solve_ermakov", s, {{"solver", solver_echo(s, sol)}}, wall, r.files);
    return r;
  });
}

RunResult run_trajectory(const Scenario& scenario, const OutputOptions& out) {
  return for_each_run(scenario, out, [&](const Scenario& s, const fs::path& dir) {
    const auto start = Clock::now();
    const ErmakovSolution sol = solve_scenario(s);
    const FrequencyProfile prof = s.profile();
    const oracle::Trajectory traj = oracle::integrate_characteristics(prof, s.xc, s.pc, s.t_end, s.step);

    const auto idx = output_indices(sol.size(), s.output_every);
    std::vector<double> times;
    for (std::size_t i : idx) times.push_back(sol.grid()[i]);
    const auto centre = centre_trajectory(sol, s.xc, s.pc, times);

    io::Table c{s.hash(), {"t", "x_c", "p_c"}, {}};
    io::Table o{s.hash(), {"t", "x", "p"}, {}};
    RunResult r;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      // The oracle grid has the same knots as the solver's for a fixed step;
      // the adaptive solver shares the uniform output grid too.
      const auto [x, p] = traj.states.at(idx[k]);
      c.rows.push_back({centre[k].t, centre[k].x, centre[k].p});
      o.rows.push_back({traj.times.at(idx[k]), x, p});
      r.max_discrepancy = std::max(r.max_discrepancy, std::hypot(centre[k].x - x, centre[k].p - p));
    }
    r.files.push_back(io::write_table(dir, "centre", c, out.format));
    r.files.push_back(io::write_table(dir, "centre_oracle", o, out.format));
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    write_manifest(dir, "trajectory", s,
                   {{"solver", solver_echo(s, sol)}, {"max_discrepancy", r.max_discrepancy}}, wall,
                   r.files);
    return r;
  });
}

RunResult run_evolve(const Scenario& scenario, const OutputOptions& out) {
  return for_each_run(scenario, out, [&](const Scenario& s, const fs::path& dir) {
    const auto start = Clock::now();
    const ErmakovSolution sol = solve_scenario(s);
    const GaussianState g = s.initial_state();
    RunResult r;
    ordered_json masses = ordered_json::array();
    for (double t : s.snapshot_times()) {
      const EtaMap m = eta_at(sol, t);
      const GridWindow w = default_window(g, m, s.grid_widths);
      const std::size_t resolving = resolving_grid_size(g, m, s.grid_widths);
      const std::size_t n = s.grid_n > 0 ? s.grid_n : std::max<std::size_t>(256, resolving);
      const DensityGrid grid = evaluate_grid(g, m, w, n);
      io::Table table{s.hash(), {"x", "p", "gamma"}, {}};
      table.rows.reserve(grid.values.size());
      for (std::size_t ix = 0; ix < grid.nx; ++ix)
        for (std::size_t ip = 0; ip < grid.np; ++ip)
          table.rows.push_back({grid.xs[ix], grid.ps[ip], grid.at(ix, ip)});
      const std::string stem = "density_t" + snapshot_stamp(t);
      r.files.push_back(io::write_table(dir, stem, table, out.format));

      ordered_json meta;
      meta["scenario_hash"] = s.hash();
      meta["t"] = t;
      meta["window"] = {{"x_min", w.x_min}, {"x_max", w.x_max}, {"p_min", w.p_min}, {"p_max", w.p_max}};
      meta["nx"] = grid.nx;
      meta["np"] = grid.np;
      meta["resolving_n"] = resolving;
      meta["cell_area"] = grid.cell_area();
      meta["mass"] = grid.mass();
      meta["eta"] = {m.eta1, m.eta2, m.eta3, m.eta4};
      meta["data"] = r.files.back().filename().string();
      const fs::path sidecar = dir / (stem + (out.format == io::Format::csv ? ".json" : ".meta.json"));
      io::write_text(sidecar, meta.dump(2) + "\n");
      r.files.push_back(sidecar);
      masses.push_back({{"t", t}, {"mass", grid.mass()}});
    }
    const double wall = std::chrono::duration<double>(Clock::now() - start).count();
    write_manifest(dir, "evolve", s, {{"solver", solver_echo(s, sol)}, {"mass", masses}}, wall,
                   r.files);
    return r;
  });
}

Report run_verify(Depth depth, const fs::path& out_dir) {
  Report report = run_verification(depth);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    io::write_text(out_dir / "verify_report.json", report.to_json());
  }
  return report;
}

}  // namespace kvnosc
