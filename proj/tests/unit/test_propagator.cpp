#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kvnosc/errors.hpp"
#include "kvnosc/propagator.hpp"
#include "oracles.hpp"

using namespace kvnosc;

namespace {

std::vector<ErmakovSolution> sweep_solutions() {
  std::vector<ErmakovSolution> out;
  out.push_back(solve(FrequencyProfile::constant(1.0), 1.0, 0.0, 10.0, 1e-3));
  out.push_back(solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.0, 0.0, 10.0, 1e-3));
  for (double beta : {0.5, 2.0}) {
    const auto prof = FrequencyProfile::hyperbolic(beta);
    const auto a = analytic_rho(prof, 0.0);
    out.push_back(solve(prof, {a.rho, a.rho_dot, 0.0}, 10.0));
  }
  out.push_back(solve(FrequencyProfile::inverse_quadratic(1.0), 0.8, 0.3, 10.0, 1e-3));
  return out;
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("eta map is the identity at t = 0") {
    const auto sol = solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.7, -0.4, 1.0, 1e-3);
    const EtaMap m = eta_at(sol, 0.0);
    CHECK(m.eta1 == doctest::Approx(1.0));
    CHECK(std::abs(m.eta2) < 1e-15);
    CHECK(std::abs(m.eta3) < 1e-15);
    CHECK(m.eta4 == doctest::Approx(1.0));
  }

  TEST_CASE("constant k = 1 rotates phase space") {
    const auto sol = solve(FrequencyProfile::constant(1.0), 1.0, 0.0, 10.0, 1e-3);
    for (double t : {0.5, 1.0, std::numbers::pi / 2, 4.0, 9.9}) {
      const auto [x, p] = eta_at(sol, t).forward(-3.0, 3.0);
      const auto [xr, pr] = oracles::rotate(-3.0, 3.0, t);
      CHECK(x == doctest::Approx(xr).epsilon(1e-12));
      CHECK(p == doctest::Approx(pr).epsilon(1e-12));
    }
  }

  TEST_CASE("determinant is one for every profile and time") {
    for (const auto& sol : sweep_solutions())
      for (int i = 0; i <= 100; ++i) CHECK(std::abs(eta_at(sol, 0.1 * i).det() - 1.0) < 1e-9);
  }

  TEST_CASE("forward and pull are inverse maps") {
    const auto sol = solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.0, 0.0, 10.0, 1e-3);
    const EtaMap m = eta_at(sol, 6.3);
    const auto [x, p] = m.forward(0.7, -1.1);
    const auto [x0, p0] = m.pull(x, p);
    CHECK(x0 == doctest::Approx(0.7));
    CHECK(p0 == doctest::Approx(-1.1));
  }

  TEST_CASE("gamma coefficients follow the explicit formulas") {
    const double r0 = 1.3, rd0 = -0.2, w = 0.9;
    const auto g = gamma_at(r0, rd0, w);
    CHECK(g.gamma1 == doctest::Approx(r0 * std::cos(w)));
    CHECK(g.gamma2 == doctest::Approx(r0 * std::sin(w)));
    CHECK(g.gamma3 == doctest::Approx(std::sin(w) / r0 + rd0 * std::cos(w)));
    CHECK(g.gamma4 == doctest::Approx(std::cos(w) / r0 - rd0 * std::sin(w)));
    // Also a unit-determinant substitution.
    CHECK(g.gamma1 * g.gamma4 + g.gamma2 * g.gamma3 == doctest::Approx(1.0));
    CHECK_THROWS_AS(gamma_at(0.0, 0.0, 0.0), DomainError);
  }

  TEST_CASE("assembled propagator equals the eta map") {
    for (const auto& sol : sweep_solutions()) {
      for (int i = 0; i < 50; ++i) {
        const double t = 10.0 * i / 49.0;
        const PointMap full = assemble_full_propagator(sol, t);
        CHECK(full.matrix.max_abs_diff(eta_at(sol, t).matrix()) < 1e-10);
        CHECK(std::abs(full.amplitude - 1.0) < 1e-12);
      }
    }
  }

  TEST_CASE("Gaussian density is normalised and evolves by pullback") {
    const GaussianState g{1.0, -2.0, 0.4, 0.7};
    const double peak = 1.0 / (2 * std::numbers::pi * 0.4 * 0.7);
    CHECK(g.density(1.0, -2.0) == doctest::Approx(peak));
    const auto sol = solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.0, 0.0, 10.0, 1e-3);
    const EtaMap m0 = eta_at(sol, 0.0);
    for (double x : {-1.0, 0.3, 1.2})
      for (double p : {-2.5, -2.0, 0.0}) CHECK(std::abs(evolve_density(g, m0, x, p) - g.density(x, p)) < 1e-14);
    const EtaMap m = eta_at(sol, 5.0);
    const auto [xc, pc] = m.forward(g.xc, g.pc);
    CHECK(evolve_density(g, m, xc, pc) == doctest::Approx(peak));
  }

  TEST_CASE("grid at t = 0 is the initial Gaussian") {
    const GaussianState g{2.0, 2.0, 0.5, 0.5};
    const auto sol = solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.0, 0.0, 1.0, 1e-3);
    const EtaMap m = eta_at(sol, 0.0);
    const DensityGrid grid = evaluate_grid(g, m, default_window(g, m), 64);
    for (std::size_t i = 0; i < grid.nx; ++i)
      for (std::size_t j = 0; j < grid.np; ++j) CHECK(std::abs(grid.at(i, j) - g.density(grid.xs[i], grid.ps[j])) < 1e-14);
    CHECK(grid.window.x_min == doctest::Approx(-1.0));
    CHECK(grid.window.x_max == doctest::Approx(5.0));
  }

  TEST_CASE("rotation carries the density maximum from (-3, 3) to (3, 3) at t = pi/2") {
    const GaussianState g{-3.0, 3.0, 0.5, 0.5};
    const auto sol = solve(FrequencyProfile::constant(1.0), 1.0, 0.0, 2.0, 1e-3);
    const EtaMap m = eta_at(sol, std::numbers::pi / 2);
    const GridWindow w{-6.0, 6.0, -6.0, 6.0};
    const DensityGrid grid = evaluate_grid(g, m, w, 120);
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.values.size(); ++k)
      if (grid.values[k] > grid.values[best]) best = k;
    const double cell = 12.0 / 120;
    CHECK(std::abs(grid.xs[best / grid.np] - 3.0) <= cell);
    CHECK(std::abs(grid.ps[best % grid.np] - 3.0) <= cell);
  }

  TEST_CASE("grid mass is conserved on resolved grids") {
    for (const auto& sol : sweep_solutions()) {
      const GaussianState g{-3.0, 3.0, 0.5, 0.5};
      for (double t : {0.0, 3.0, 6.5, 10.0}) {
        const EtaMap m = eta_at(sol, t);
        const std::size_t n = std::max<std::size_t>(256, resolving_grid_size(g, m));
        CHECK(std::abs(evaluate_grid(g, m, default_window(g, m), n).mass() - 1.0) < 1e-6);
      }
    }
  }

  TEST_CASE("resolving grid size tracks the shear") {
    const GaussianState g{0.0, 0.0, 0.5, 0.5};
    CHECK(resolving_grid_size(g, EtaMap{}) == 12);
    const EtaMap sheared{1.0, 0.0, 5.0, 1.0, 0.0};
    CHECK(resolving_grid_size(g, sheared) > 12 * 5);
  }

  TEST_CASE("grid argument checks") {
    const GaussianState g;
    CHECK_THROWS_AS(evaluate_grid(g, EtaMap{}, {0, 1, 0, 1}, 0), ConfigError);
    CHECK_THROWS_AS(evaluate_grid(g, EtaMap{}, {1, 1, 0, 1}, 8), ConfigError);
    const DensityGrid small = evaluate_grid(g, EtaMap{}, {-1, 1, -2, 2}, 4);
    CHECK(small.cell_area() == doctest::Approx(0.5));
  }

  TEST_CASE("centre trajectory and classical invariant") {
    const auto sol = solve(FrequencyProfile::oscillatory(0.5, 2.5), 1.0, 0.0, 10.0, 1e-3);
    const std::vector<double> times{0.0, 2.0, 4.5, 10.0};
    const auto c = centre_trajectory(sol, 2.0, 2.0, times);
    REQUIRE(c.size() == 4);
    CHECK(c[0].x == doctest::Approx(2.0));
    CHECK(c[0].p == doctest::Approx(2.0));
    const double i0 = classical_invariant(1.0, 0.0, 2.0, 2.0);
    CHECK(i0 == doctest::Approx(4.0));
    for (const auto& pt : c) {
      const auto s = sol.sample(pt.t);
      CHECK(classical_invariant(s.rho, s.rho_dot, pt.x, pt.p) == doctest::Approx(i0).epsilon(1e-10));
    }
    CHECK(classical_invariant(2.0, 1.0, 3.0, 0.5) == doctest::Approx(0.5 * (2.25 + 4.0)));
  }

  TEST_CASE("rotation angles compose additively") {
    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    const auto sol = solve(prof, 1.0, 0.0, 10.0, 1e-3);
    const auto mid = sol.sample(3.0);
    const auto tail = solve(prof, {mid.rho, mid.rho_dot, 3.0}, 10.0);
    CHECK(sol.samples().back().omega_rho ==
          doctest::Approx(mid.omega_rho + tail.samples().back().omega_rho).epsilon(1e-12));
  }
}
