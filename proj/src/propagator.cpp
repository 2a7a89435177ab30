#include "kvnosc/propagator.hpp"

#include <cmath>
#include <numbers>

#include "kvnosc/errors.hpp"

namespace kvnosc {

double GaussianState::density(double x, double p) const {
  const double dx = (x - xc) / sigma_x;
  const double dp = (p - pc) / sigma_p;
  return std::exp(-0.5 * (dx * dx + dp * dp)) / (2.0 * std::numbers::pi * sigma_x * sigma_p);
}

EtaMap eta_at(const ErmakovSolution& solution, double t) {
  const ErmakovState s = solution.sample(t);
  const double r0 = solution.rho0();
  const double rd0 = solution.rho_dot0();
  const double r = s.rho, rd = s.rho_dot;
  const double c = std::cos(s.omega_rho), sn = std::sin(s.omega_rho);
  EtaMap m;
  m.t = t;
  m.eta1 = (r0 / r) * c + r0 * rd * sn;
  m.eta2 = r0 * r * sn;
  m.eta3 = (1.0 / (r * r0) + rd * rd0) * sn + (rd0 / r - rd / r0) * c;
  m.eta4 = (r / r0) * c - r * rd0 * sn;
  return m;
}

GammaCoefficients gamma_at(double rho0, double rho_dot0, double omega_rho) {
  if (!(rho0 > 0)) throw DomainError("gamma coefficients require rho0 > 0");
  const double c = std::cos(omega_rho), s = std::sin(omega_rho);
  return {rho0 * c, rho0 * s, s / rho0 + rho_dot0 * c, c / rho0 - rho_dot0 * s};
}

double evolve_density(const GaussianState& state0, const EtaMap& map, double x, double p) {
  const auto [x0, p0] = map.pull(x, p);
  return state0.density(x0, p0);
}

std::vector<CentrePoint> centre_trajectory(const ErmakovSolution& solution, double xc0, double pc0,
                                           std::span<const double> times) {
  std::vector<CentrePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto [x, p] = eta_at(solution, t).forward(xc0, pc0);
    out.push_back({t, x, p});
  }
  return out;
}

namespace {

constexpr Complex kI{0.0, 1.0};

// T1 = exp(i (rho_dot/rho) x lp); sign = -1 gives the adjoint.
PointMap t1_map(double rho, double rho_dot, double sign) {
  return exp_action(sign * kI * shear_p_generator(), rho_dot / rho);
}

// T2 = exp(i ln(rho)/2 (x lx + lx x)) exp(-i ln(rho)/2 (p lp + lp p)).
PointMap t2_map(double rho, double sign) {
  const double half_log = 0.5 * std::log(rho);
  const PointMap dil_x = exp_action(sign * kI * dilation_x_generator(), half_log);
  const PointMap dil_p = exp_action(-sign * kI * dilation_p_generator(), half_log);
  return product(dil_x, dil_p);
}

}  // namespace

PointMap assemble_full_propagator(const ErmakovSolution& solution, double t) {
  const ErmakovState s = solution.sample(t);
  const double r0 = solution.rho0(), rd0 = solution.rho_dot0();

  const PointMap t1_dag = t1_map(s.rho, s.rho_dot, -1.0);
  const PointMap t2_dag = t2_map(s.rho, -1.0);
  const PointMap rotation = exp_action(-kI * rotation_generator(), s.omega_rho);
  const PointMap t2_0 = t2_map(r0, 1.0);
  const PointMap t1_0 = t1_map(r0, rd0, 1.0);

  return product(product(product(product(t1_dag, t2_dag), rotation), t2_0), t1_0);
}

double classical_invariant(double rho, double rho_dot, double x, double p) {
  const double a = x / rho;
  const double b = rho_dot * x - rho * p;
  return 0.5 * (a * a + b * b);
}

double DensityGrid::cell_area() const {
  return (window.x_max - window.x_min) / static_cast<double>(nx) *
         (window.p_max - window.p_min) / static_cast<double>(np);
}

double DensityGrid::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * cell_area();
}

GridWindow default_window(const GaussianState& state0, const EtaMap& map, double widths) {
  // Evolved covariance F S0 F^T with F = M^{-1} = [[eta4, eta2], [-eta3, eta1]].
  const double sx2 = state0.sigma_x * state0.sigma_x;
  const double sp2 = state0.sigma_p * state0.sigma_p;
  const double var_x = map.eta4 * map.eta4 * sx2 + map.eta2 * map.eta2 * sp2;
  const double var_p = map.eta3 * map.eta3 * sx2 + map.eta1 * map.eta1 * sp2;
  const auto [xc, pc] = map.forward(state0.xc, state0.pc);
  const double wx = widths * std::sqrt(var_x);
  const double wp = widths * std::sqrt(var_p);
  return {xc - wx, xc + wx, pc - wp, pc + wp};
}

std::size_t resolving_grid_size(const GaussianState& state0, const EtaMap& map, double widths) {
  const double sx2 = state0.sigma_x * state0.sigma_x;
  const double sp2 = state0.sigma_p * state0.sigma_p;
  const double var_x = map.eta4 * map.eta4 * sx2 + map.eta2 * map.eta2 * sp2;
  const double var_p = map.eta3 * map.eta3 * sx2 + map.eta1 * map.eta1 * sp2;
  // det of the evolved covariance is sx2 sp2 / det(M)^2; the conditional
  // standard deviation of p given x is sqrt(det / var_x), and likewise for x.
  const double det_cov = sx2 * sp2 / (map.det() * map.det());
  const double aspect = std::sqrt(var_x * var_p / det_cov);
  return static_cast<std::size_t>(std::ceil(2.0 * widths * aspect));
}

DensityGrid evaluate_grid(const GaussianState& state0, const EtaMap& map, const GridWindow& window,
                          std::size_t n) {
  if (n == 0) throw ConfigError("grid resolution must be positive");
  if (!(window.x_max > window.x_min) || !(window.p_max > window.p_min))
    throw ConfigError("grid window must have positive extent");
  DensityGrid g;
  g.window = window;
  g.nx = g.np = n;
  const double dx = (window.x_max - window.x_min) / static_cast<double>(n);
  const double dp = (window.p_max - window.p_min) / static_cast<double>(n);
  g.xs.resize(n);
  g.ps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.xs[i] = window.x_min + (static_cast<double>(i) + 0.5) * dx;
    g.ps[i] = window.p_min + (static_cast<double>(i) + 0.5) * dp;
  }
  g.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g.values[i * n + j] = evolve_density(state0, map, g.xs[i], g.ps[j]);
  return g;
}

}  // namespace kvnosc
