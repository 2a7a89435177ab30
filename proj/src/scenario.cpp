#include "kvnosc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "kvnosc/errors.hpp"
#include "kvnosc/io.hpp"

namespace kvnosc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("bad number for '" + std::string(key) + "': '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("bad integer for '" + std::string(key) + "': '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean for '" + std::string(key) + "': '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += io::format_double(v[i]);
  }
  return out;
}

}  // namespace

FrequencyProfile Scenario::profile() const {
  if (kind == "hyperbolic") return FrequencyProfile::hyperbolic(beta);
  if (kind == "inverse_quadratic") return FrequencyProfile::inverse_quadratic(gamma);
  if (kind == "oscillatory") return FrequencyProfile::oscillatory(delta, omega);
  if (kind == "constant") return FrequencyProfile::constant(k0);
  if (kind == "tabulated") return FrequencyProfile::tabulated(knots);
  throw ConfigError("unknown profile kind '" + kind + "'");
}

InitialData Scenario::initial_data() const {
  if (analytic_initial_data) {
    const FrequencyProfile prof = profile();
    if (!prof.analytic_available())
      throw ConfigError("analytic_initial_data requires a profile with a closed form");
    const AnalyticAuxiliary a = analytic_rho(prof, 0.0);
    return {a.rho, a.rho_dot, 0.0};
  }
  return {rho0, rho_dot0, 0.0};
}

SolverOptions Scenario::solver_options() const {
  SolverOptions opt;
  opt.step = step;
  opt.adaptive = adaptive;
  return opt;
}

std::vector<double> Scenario::snapshot_times() const {
  if (!snapshots.empty()) return snapshots;
  if (t_end == 0.0) return {0.0};
  return {0.0, 0.5 * t_end, t_end};
}

std::string Scenario::canonical() const {
  std::ostringstream out;
  auto kv = [&](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  auto num = [&](const char* k, double v) { kv(k, io::format_double(v)); };
  kv("kind", kind);
  if (kind == "hyperbolic") num("beta", beta);
  if (kind == "inverse_quadratic") num("gamma", gamma);
  if (kind == "oscillatory") {
    num("delta", delta);
    num("omega", omega);
  }
  if (kind == "constant") num("k0", k0);
  if (kind == "tabulated") {
    std::string s;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (i) s += ',';
      s += io::format_double(knots[i].first) + ":" + io::format_double(knots[i].second);
    }
    kv("knots", s);
  }
  kv("analytic_initial_data", analytic_initial_data ? "true" : "false");
  num("rho0", rho0);
  num("rho_dot0", rho_dot0);
  num("xc", xc);
  num("pc", pc);
  num("sigma_x", sigma_x);
  num("sigma_p", sigma_p);
  num("t_end", t_end);
  num("step", step);
  kv("adaptive", adaptive ? "true" : "false");
  kv("seed", std::to_string(seed));
  kv("output_every", std::to_string(output_every));
  kv("grid_n", std::to_string(grid_n));
  num("grid_widths", grid_widths);
  kv("snapshots", join(snapshot_times()));
  kv("n_samples", std::to_string(n_samples));
  return out.str();
}

std::string Scenario::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(io::fnv1a64(canonical())));
  return buf;
}

std::vector<std::pair<std::string, Scenario>> Scenario::expand() const {
  if (kind != "hyperbolic" || beta_sweep.empty()) return {{"", *this}};
  std::vector<std::pair<std::string, Scenario>> out;
  for (double b : beta_sweep) {
    Scenario s = *this;
    s.beta = b;
    s.beta_sweep.clear();
    out.emplace_back("beta_" + io::format_double(b), std::move(s));
  }
  return out;
}

void Scenario::validate() const {
  profile();  // kind and parameters
  if (!(rho0 > 0)) throw ConfigError("rho0 must be positive");
  if (!(sigma_x > 0) || !(sigma_p > 0)) throw ConfigError("sigma_x and sigma_p must be positive");
  if (!(t_end >= 0)) throw ConfigError("t_end must be non-negative");
  if (!(step > 0)) throw ConfigError("step must be positive");
  if (output_every == 0) throw ConfigError("output_every must be positive");
  if (!(grid_widths > 0)) throw ConfigError("grid_widths must be positive");
  for (double b : beta_sweep)
    if (!(b > 0)) throw ConfigError("beta_sweep entries must be positive");
  for (double t : snapshot_times())
    if (t < 0 || t > t_end) throw ConfigError("snapshot times must lie in [0, t_end]");
  initial_data();
}

Scenario preset(std::string_view name) {
  Scenario s;
  s.preset = std::string(name);
  if (name == "fig2") {
    s.kind = "oscillatory";
    s.delta = 0.5;
    s.omega = 2.5;
    s.xc = 2.0;
    s.pc = 2.0;
  } else if (name == "fig1") {
    // beta is not fixed by the figure; sweep a representative range.
    s.kind = "hyperbolic";
    s.beta_sweep = {0.5, 1.0, 2.0};
    s.analytic_initial_data = true;
    s.xc = -3.0;
    s.pc = 3.0;
  } else if (name == "constant") {
    s.kind = "constant";
    s.k0 = 1.0;
    s.xc = -3.0;
    s.pc = 3.0;
  } else if (name == "hyperbolic") {
    s.kind = "hyperbolic";
    s.beta = 1.0;
    s.analytic_initial_data = true;
    s.xc = -3.0;
    s.pc = 3.0;
  } else if (name == "inverse_quadratic") {
    s.kind = "inverse_quadratic";
    s.gamma = 1.0;
    s.analytic_initial_data = true;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return s;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "constant", "hyperbolic", "inverse_quadratic"};
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "preset") {
    s = preset(value);
  } else if (key == "kind") {
    s.kind = std::string(value);
  } else if (key == "beta") {
    s.beta = parse_double(key, value);
    s.beta_sweep.clear();
  } else if (key == "beta_sweep") {
    s.beta_sweep = parse_list(key, value);
  } else if (key == "gamma") {
    s.gamma = parse_double(key, value);
  } else if (key == "delta") {
    s.delta = parse_double(key, value);
  } else if (key == "omega") {
    s.omega = parse_double(key, value);
  } else if (key == "k0") {
    s.k0 = parse_double(key, value);
  } else if (key == "knots") {
    s.knots.clear();
    for (auto item : split(value, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError("knots must be written t:k, t:k, ...");
      s.knots.emplace_back(parse_double(key, parts[0]), parse_double(key, parts[1]));
    }
  } else if (key == "rho0") {
    s.rho0 = parse_double(key, value);
    s.analytic_initial_data = false;
  } else if (key == "rho_dot0") {
    s.rho_dot0 = parse_double(key, value);
    s.analytic_initial_data = false;
  } else if (key == "analytic_initial_data") {
    s.analytic_initial_data = parse_bool(key, value);
  } else if (key == "xc") {
    s.xc = parse_double(key, value);
  } else if (key == "pc") {
    s.pc = parse_double(key, value);
  } else if (key == "sigma_x") {
    s.sigma_x = parse_double(key, value);
  } else if (key == "sigma_p") {
    s.sigma_p = parse_double(key, value);
  } else if (key == "t_end") {
    s.t_end = parse_double(key, value);
  } else if (key == "step") {
    s.step = parse_double(key, value);
  } else if (key == "adaptive") {
    s.adaptive = parse_bool(key, value);
  } else if (key == "seed") {
    s.seed = parse_unsigned(key, value);
  } else if (key == "output_every") {
    s.output_every = parse_unsigned(key, value);
  } else if (key == "grid_n") {
    s.grid_n = parse_unsigned(key, value);
  } else if (key == "grid_widths") {
    s.grid_widths = parse_double(key, value);
  } else if (key == "snapshots") {
    s.snapshots = parse_list(key, value);
  } else if (key == "n_samples") {
    s.n_samples = parse_unsigned(key, value);
  } else {
    throw ConfigError("unknown scenario key '" + std::string(key) + "'");
  }
}

Scenario parse_scenario(std::istream& in, Scenario base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  return base;
}

Scenario load_scenario_file(const std::filesystem::path& path, Scenario base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file " + path.string());
  return parse_scenario(f, std::move(base));
}

}  // namespace kvnosc
