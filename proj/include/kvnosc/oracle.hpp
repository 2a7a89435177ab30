#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "kvnosc/ermakov.hpp"
#include "kvnosc/freq.hpp"
#include "kvnosc/propagator.hpp"

// Brute-force ground truth for the propagator: characteristics of the
// Liouville equation, x' = p, p' = -k(t) x, integrated directly. Shares no
// code with the Ermakov solver.
namespace kvnosc::oracle {

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<double, double>> states;  // (x, p)
};

/// Fixed-step RK4 on [t_start, t_end]. The grid matches the Ermakov solver's
/// for equal (t_start, t_end, step). Throws ConfigError.
Trajectory integrate_characteristics(const FrequencyProfile& profile, double x0, double p0,
                                     double t_end, double step, double t_start = 0.0);

struct Moments {
  double t, mean_x, mean_p, var_x, var_p;
};

/// Monte-Carlo moments of an ensemble drawn from state0 and moved along
/// characteristics. Reported every `stride` steps and at t_end. Sample i
/// depends only on (seed, i); blocks are reduced in index order, so the
/// result does not depend on the worker count.
std::vector<Moments> ensemble_moments(const FrequencyProfile& profile, const GaussianState& state0,
                                      std::size_t n_samples, double t_end, double step,
                                      std::uint64_t seed, std::size_t stride = 100,
                                      unsigned workers = 0);

/// max |I_cl(t) - I_cl(0)| / I_cl(0) along the trajectory, with rho and
/// rho_dot taken from `solution` at the trajectory times.
/// Throws DegenerateInvariant when I_cl(0) < 1e-12.
double invariant_along(const ErmakovSolution& solution, const Trajectory& trajectory);

/// Standard normal pair for (seed, index), counter based.
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t index);

}  // namespace kvnosc::oracle
