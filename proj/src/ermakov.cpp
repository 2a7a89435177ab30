#include "kvnosc/ermakov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "kvnosc/errors.hpp"

namespace kvnosc {

namespace {

using State = std::array<double, 3>;  // rho, rho_dot, omega_rho

State axpy(const State& y, double h, const State& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
}

// Right-hand side of the augmented Ermakov system. Throws on collapse.
struct ErmakovRhs {
  const FrequencyProfile& profile;

  State operator()(double t, const State& y) const {
    const double rho = y[0];
    if (!(rho >= kRhoCollapseFloor)) {
      std::ostringstream msg;
      msg << "rho collapsed to " << rho << " at t = " << t;
      throw RhoCollapse(msg.str());
    }
    const double inv2 = 1.0 / (rho * rho);
    return {y[1], inv2 / rho - profile.k(t) * rho, inv2};
  }
};

State rk4_step(const ErmakovRhs& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
  const State k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
  const State k4 = f(t + h, axpy(y, h, k3));
  State out;
  for (int i = 0; i < 3; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct DopriTrial {
  State y;
  double err;
};

DopriTrial dopri_trial(const ErmakovRhs& f, double t, const State& y, double h,
                       const SolverOptions& opt) {
  const State k1 = f(t, y);
  State tmp;
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  const State k2 = f(t + c2 * h, tmp);
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const State k3 = f(t + c3 * h, tmp);
  for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const State k4 = f(t + c4 * h, tmp);
  for (int i = 0; i < 3; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const State k5 = f(t + c5 * h, tmp);
  for (int i = 0; i < 3; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  const State k6 = f(t + h, tmp);
  State ynew;
  for (int i = 0; i < 3; ++i)
    ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  const State k7 = f(t + h, ynew);
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double e =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
    err = std::max(err, std::abs(e) / scale);
  }
  return {ynew, err};
}

// Advance y from t0 to t1 exactly, with adaptive substeps. h_try persists
// across calls.
State dopri_segment(const ErmakovRhs& f, double t0, double t1, State y, double& h_try,
                    const SolverOptions& opt) {
  double t = t0;
  const double span = t1 - t0;
  while (t < t1) {
    double h = std::min(h_try, t1 - t);
    const bool last = (h >= t1 - t);
    DopriTrial trial;
    try {
      trial = dopri_trial(f, t, y, h, opt);
    } catch (const RhoCollapse&) {
      // A trial step can overshoot into rho < floor; retreat unless the step
      // is already negligible.
      if (h < 1e-12 * std::max(1.0, std::abs(span))) throw;
      h_try = 0.25 * h;
      continue;
    }
    if (trial.err <= 1.0) {
      t = last ? t1 : t + h;
      y = trial.y;
    }
    const double factor =
        trial.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(trial.err, -0.2), 0.2, 5.0);
    // Do not let the forced landing on t1 shrink the step carried forward.
    if (!(last && trial.err <= 1.0 && factor >= 1.0)) h_try = h * factor;
    if (h_try < 1e-14 * std::max(1.0, std::abs(span)))
      throw RhoCollapse("adaptive step size underflow");
  }
  return y;
}

std::size_t step_count(double duration, double step) {
  const double r = duration / step;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r * (1.0 - 1e-12))));
}

}  // namespace

ErmakovSolution::ErmakovSolution(FrequencyProfile profile, std::vector<double> grid,
                                 std::vector<ErmakovState> samples, double step)
    : profile_(std::move(profile)),
      grid_(std::move(grid)),
      samples_(std::move(samples)),
      step_(step) {
  if (grid_.empty() || grid_.size() != samples_.size())
    throw ConfigError("ErmakovSolution needs matching non-empty grid and samples");
}

double ErmakovSolution::rho_ddot_at(std::size_t i) const {
  const double rho = samples_.at(i).rho;
  return 1.0 / (rho * rho * rho) - profile_.k(grid_[i]) * rho;
}

std::size_t ErmakovSolution::knot_index(double t) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (it != grid_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - grid_.begin());
  if (it != grid_.begin() && std::abs(*(it - 1) - t) <= tol)
    return static_cast<std::size_t>(it - grid_.begin() - 1);
  return npos;
}

ErmakovState ErmakovSolution::sample(double t) const {
  if (const std::size_t k = knot_index(t); k != npos) return samples_[k];
  if (t < grid_.front() || t > grid_.back()) {
    std::ostringstream msg;
    msg << "t = " << t << " outside solution range [" << grid_.front() << ", " << grid_.back()
        << "]";
    throw OutOfRange(msg.str());
  }
  const auto hi_it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t i = static_cast<std::size_t>(hi_it - grid_.begin()) - 1;
  const double t0 = grid_[i];
  const double h = grid_[i + 1] - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  auto hermite = [&](double y0, double y1, double m0, double m1) {
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
  };

  const ErmakovState& a = samples_[i];
  const ErmakovState& b = samples_[i + 1];
  const double rho = hermite(a.rho, b.rho, a.rho_dot, b.rho_dot);
  const double rho_dot = hermite(a.rho_dot, b.rho_dot, rho_ddot_at(i), rho_ddot_at(i + 1));

  double m0 = 1.0 / (a.rho * a.rho);
  double m1 = 1.0 / (b.rho * b.rho);
  const double secant = (b.omega_rho - a.omega_rho) / h;
  if (secant <= 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double alpha = m0 / secant, beta = m1 / secant;
    const double mag2 = alpha * alpha + beta * beta;
    if (mag2 > 9.0) {
      const double tau = 3.0 / std::sqrt(mag2);
      m0 = tau * alpha * secant;
      m1 = tau * beta * secant;
    }
  }
  const double omega = hermite(a.omega_rho, b.omega_rho, m0, m1);
  return {rho, rho_dot, omega};
}

ErmakovSolution solve(const FrequencyProfile& profile, const InitialData& initial, double t_end,
                      const SolverOptions& options) {
  if (!std::isfinite(initial.rho0) || !std::isfinite(initial.rho_dot0) ||
      !std::isfinite(initial.t_start) || !std::isfinite(t_end))
    throw ConfigError("initial data and bounds must be finite");
  if (!(initial.rho0 > 0)) throw ConfigError("rho0 must be positive");
  if (!(options.step > 0) || !std::isfinite(options.step)) throw ConfigError("step must be positive");
  if (!(t_end >= initial.t_start)) throw ConfigError("t_end precedes the start time");
  if (options.adaptive && !(options.abs_tol > 0 && options.rel_tol >= 0))
    throw ConfigError("adaptive tolerances must be positive");

  const double duration = t_end - initial.t_start;
  // A zero-length run is the single initial sample.
  const std::size_t n = duration > 0 ? step_count(duration, options.step) : 0;
  const double h = n > 0 ? duration / static_cast<double>(n) : options.step;

  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = initial.t_start + static_cast<double>(i) * h;
  grid[n] = t_end;

  const ErmakovRhs rhs{profile};
  std::vector<ErmakovState> samples;
  samples.reserve(n + 1);
  State y{initial.rho0, initial.rho_dot0, 0.0};
  rhs(initial.t_start, y);  // validates the start point
  samples.push_back({y[0], y[1], y[2]});

  double h_try = h;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = grid[i + 1] - grid[i];
    y = options.adaptive ? dopri_segment(rhs, grid[i], grid[i + 1], y, h_try, options)
                         : rk4_step(rhs, grid[i], y, dt);
    if (!(y[0] >= kRhoCollapseFloor)) {
      std::ostringstream msg;
      msg << "rho collapsed to " << y[0] << " at t = " << grid[i + 1];
      throw RhoCollapse(msg.str());
    }
    samples.push_back({y[0], y[1], y[2]});
  }
  return ErmakovSolution(profile, std::move(grid), std::move(samples), h);
}

ErmakovSolution solve(const FrequencyProfile& profile, double rho0, double rho_dot0, double t_end,
                      double step) {
  SolverOptions opt;
  opt.step = step;
  return solve(profile, InitialData{rho0, rho_dot0, 0.0}, t_end, opt);
}

ConvergenceEstimate convergence_order(const FrequencyProfile& profile, const InitialData& initial,
                                      double t_end, double base_step) {
  const double duration = t_end - initial.t_start;
  if (!(base_step > 0) || !(duration > 0)) throw ConfigError("invalid convergence controls");
  // Force the finer runs onto exactly 2n and 4n steps so every coarse knot is shared.
  const std::size_t n = step_count(duration, base_step);
  auto run = [&](std::size_t steps) {
    SolverOptions opt;
    opt.step = duration / static_cast<double>(steps);
    return solve(profile, initial, t_end, opt);
  };
  const ErmakovSolution coarse = run(n), mid = run(2 * n), fine = run(4 * n);

  auto gap = [](const ErmakovState& a, const ErmakovState& b) {
    return std::max({std::abs(a.rho - b.rho), std::abs(a.rho_dot - b.rho_dot),
                     std::abs(a.omega_rho - b.omega_rho)});
  };
  ConvergenceEstimate est;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    est.diff_coarse = std::max(est.diff_coarse, gap(coarse.samples()[i], mid.samples()[2 * i]));
    est.diff_fine = std::max(est.diff_fine, gap(mid.samples()[2 * i], fine.samples()[4 * i]));
  }
  if (est.diff_coarse == 0.0 && est.diff_fine == 0.0) {
    est.exact_solution = true;
    return est;
  }
  est.order = std::log2(est.diff_coarse / est.diff_fine);
  return est;
}

}  // namespace kvnosc
