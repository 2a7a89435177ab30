#include "kvnosc/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "kvnosc/errors.hpp"

namespace kvnosc::oracle {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1] from the top 53 bits.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

std::vector<double> uniform_times(double t_start, double t_end, double step) {
  const double duration = t_end - t_start;
  if (duration == 0.0) return {t_start};
  const auto n = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(duration / step * (1.0 - 1e-12))));
  const double h = duration / static_cast<double>(n);
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = t_start + static_cast<double>(i) * h;
  times[n] = t_end;
  return times;
}

struct Phase {
  double x, p;
};

Phase rk4(const FrequencyProfile& profile, double t, Phase z, double h) {
  auto f = [&](double tt, Phase s) { return Phase{s.p, -profile.k(tt) * s.x}; };
  const Phase k1 = f(t, z);
  const Phase k2 = f(t + h / 2, {z.x + h / 2 * k1.x, z.p + h / 2 * k1.p});
  const Phase k3 = f(t + h / 2, {z.x + h / 2 * k2.x, z.p + h / 2 * k2.p});
  const Phase k4 = f(t + h, {z.x + h * k3.x, z.p + h * k3.p});
  return {z.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
          z.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

void check_controls(double t_start, double t_end, double step, bool allow_empty) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(step))
    throw ConfigError("characteristics controls must be finite");
  if (!(step > 0)) throw ConfigError("step must be positive");
  if (allow_empty ? !(t_end >= t_start) : !(t_end > t_start))
    throw ConfigError("t_end must exceed the start time");
}

}  // namespace

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(index));
  const double u1 = unit_open(splitmix64(key));
  const double u2 = unit_open(splitmix64(key + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

Trajectory integrate_characteristics(const FrequencyProfile& profile, double x0, double p0,
                                     double t_end, double step, double t_start) {
  check_controls(t_start, t_end, step, true);
  Trajectory traj;
  traj.times = uniform_times(t_start, t_end, step);
  traj.states.reserve(traj.times.size());
  Phase z{x0, p0};
  traj.states.emplace_back(z.x, z.p);
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    z = rk4(profile, traj.times[i], z, traj.times[i + 1] - traj.times[i]);
    traj.states.emplace_back(z.x, z.p);
  }
  return traj;
}

std::vector<Moments> ensemble_moments(const FrequencyProfile& profile, const GaussianState& state0,
                                      std::size_t n_samples, double t_end, double step,
                                      std::uint64_t seed, std::size_t stride, unsigned workers) {
  if (n_samples < 1000) throw ConfigError("ensemble needs at least 1000 samples");
  if (stride == 0) throw ConfigError("stride must be positive");
  check_controls(0.0, t_end, step, false);
  const std::vector<double> times = uniform_times(0.0, t_end, step);

  std::vector<std::size_t> report;
  for (std::size_t i = 0; i < times.size(); i += stride) report.push_back(i);
  if (report.back() != times.size() - 1) report.push_back(times.size() - 1);

  // Per block: sums of x, p, x^2, p^2 at each report index.
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<std::vector<std::array<double, 4>>> partial(
      n_blocks, std::vector<std::array<double, 4>>(report.size(), {0, 0, 0, 0}));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < n_blocks; b = next++) {
      auto& acc = partial[b];
      const std::size_t end = std::min(n_samples, (b + 1) * kBlock);
      for (std::size_t s = b * kBlock; s < end; ++s) {
        const auto [g1, g2] = normal_pair(seed, s);
        Phase z{state0.xc + state0.sigma_x * g1, state0.pc + state0.sigma_p * g2};
        std::size_t r = 0;
        for (std::size_t i = 0; i < times.size(); ++i) {
          if (r < report.size() && report[r] == i) {
            acc[r][0] += z.x;
            acc[r][1] += z.p;
            acc[r][2] += z.x * z.x;
            acc[r][3] += z.p * z.p;
            ++r;
          }
          if (i + 1 < times.size()) z = rk4(profile, times[i], z, times[i + 1] - times[i]);
        }
      }
    }
  };

  unsigned n_threads = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_blocks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }

  std::vector<Moments> out;
  out.reserve(report.size());
  const double n = static_cast<double>(n_samples);
  for (std::size_t r = 0; r < report.size(); ++r) {
    std::array<double, 4> sum{0, 0, 0, 0};
    for (std::size_t b = 0; b < n_blocks; ++b)
      for (int j = 0; j < 4; ++j) sum[j] += partial[b][r][j];
    const double mx = sum[0] / n, mp = sum[1] / n;
    // Unbiased sample variance.
    const double vx = (sum[2] - n * mx * mx) / (n - 1.0);
    const double vp = (sum[3] - n * mp * mp) / (n - 1.0);
    out.push_back({times[report[r]], mx, mp, vx, vp});
  }
  return out;
}

double invariant_along(const ErmakovSolution& solution, const Trajectory& trajectory) {
  if (trajectory.times.empty()) throw ConfigError("empty trajectory");
  auto invariant_at = [&](std::size_t i) {
    const ErmakovState s = solution.sample(trajectory.times[i]);
    const auto [x, p] = trajectory.states[i];
    return classical_invariant(s.rho, s.rho_dot, x, p);
  };
  const double initial = invariant_at(0);
  if (initial < 1e-12) throw DegenerateInvariant("classical invariant vanishes at the start point");
  double drift = 0.0;
  for (std::size_t i = 1; i < trajectory.times.size(); ++i)
    drift = std::max(drift, std::abs(invariant_at(i) - initial) / initial);
  return drift;
}

}  // namespace kvnosc::oracle
