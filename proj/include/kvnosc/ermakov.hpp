#pragma once

#include <cstddef>
#include <vector>

#include "kvnosc/freq.hpp"

namespace kvnosc {

// Below this rho the 1/rho^3 term is not trusted; checked at every RK stage.
inline constexpr double kRhoCollapseFloor = 1e-8;

struct ErmakovState {
  double rho;
  double rho_dot;
  double omega_rho;  // \int_{t_start}^{t} dt'/rho^2
};

struct InitialData {
  double rho0 = 1.0;
  double rho_dot0 = 0.0;
  // Time origin of the run. omega_rho is measured from here.
  double t_start = 0.0;
};

struct SolverOptions {
  double step = 1e-3;
  // Dormand-Prince 5(4) with error control, landing exactly on the uniform
  // output grid of spacing `step`.
  bool adaptive = false;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
};

/// Gridded solution of rho'' + k(t) rho = 1/rho^3 with the phase
/// omega_rho' = 1/rho^2 carried as a third component.
class ErmakovSolution {
 public:
  ErmakovSolution(FrequencyProfile profile, std::vector<double> grid,
                  std::vector<ErmakovState> samples, double step);

  const FrequencyProfile& profile() const { return profile_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<ErmakovState>& samples() const { return samples_; }
  std::size_t size() const { return grid_.size(); }
  double step() const { return step_; }
  double t_start() const { return grid_.front(); }
  double t_end() const { return grid_.back(); }
  double rho0() const { return samples_.front().rho; }
  double rho_dot0() const { return samples_.front().rho_dot; }

  // rho'' at a knot, from the Ermakov equation itself.
  double rho_ddot_at(std::size_t i) const;

  /// Dense output. Cubic Hermite in rho (slopes rho_dot), in rho_dot (slopes
  /// from the ODE) and in omega_rho (slopes 1/rho^2, Fritsch-Carlson limited
  /// so the interpolant stays monotone). Exact at knots. Throws OutOfRange.
  ErmakovState sample(double t) const;

  // Index of the knot at t if t is a knot (to rounding), otherwise npos.
  std::size_t knot_index(double t) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  FrequencyProfile profile_;
  std::vector<double> grid_;
  std::vector<ErmakovState> samples_;
  double step_;
};

/// Integrate on [initial.t_start, t_end] with the given options.
/// Throws ConfigError on bad bounds/step and RhoCollapse if rho < 1e-8 at any stage.
ErmakovSolution solve(const FrequencyProfile& profile, const InitialData& initial, double t_end,
                      const SolverOptions& options = {});

// Fixed-step RK4 from t = 0.
ErmakovSolution solve(const FrequencyProfile& profile, double rho0, double rho_dot0, double t_end,
                      double step);

struct ConvergenceEstimate {
  double order = 0.0;
  // Runs at h and h/2 (and h/2, h/4) agree exactly: the solution is
  // reproduced without truncation error and no order can be estimated.
  bool exact_solution = false;
  double diff_coarse = 0.0;  // max |y_h - y_{h/2}| over shared knots
  double diff_fine = 0.0;    // max |y_{h/2} - y_{h/4}| over shared knots
};

/// Richardson estimate of the observed order of the fixed-step solver from
/// runs at h, h/2, h/4. Differences are the max over the coarse knots and
/// over all three components; a single end-point value can sit near a zero
/// of the error and give an erratic ratio.
ConvergenceEstimate convergence_order(const FrequencyProfile& profile, const InitialData& initial,
                                      double t_end, double base_step = 0.02);

}  // namespace kvnosc
