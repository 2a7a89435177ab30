#include <cmath>

#include "doctest.h"
#include "kvnosc/errors.hpp"
#include "kvnosc/oracle.hpp"
#include "oracles.hpp"

using namespace kvnosc;

TEST_SUITE("oracle") {
  TEST_CASE("characteristics of k = 1 are rotations") {
    const auto traj = oracle::integrate_characteristics(FrequencyProfile::constant(1.0), -3.0, 3.0, 10.0, 1e-3);
    REQUIRE(traj.times.size() == 10001);
    CHECK(traj.times.back() == 10.0);
    for (std::size_t i = 0; i < traj.times.size(); i += 997) {
      const auto [x, p] = oracles::rotate(-3.0, 3.0, traj.times[i]);
      CHECK(std::abs(traj.states[i].first - x) < 1e-10);
      CHECK(std::abs(traj.states[i].second - p) < 1e-10);
    }
  }

  TEST_CASE("time grid matches the Ermakov solver's") {
    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    const auto traj = oracle::integrate_characteristics(prof, 1.0, 1.0, 7.3, 0.013);
    const auto sol = solve(prof, 1.0, 0.0, 7.3, 0.013);
    REQUIRE(traj.times.size() == sol.size());
    for (std::size_t i = 0; i < sol.size(); ++i) CHECK(traj.times[i] == sol.grid()[i]);
  }

  TEST_CASE("agrees with the eta map on the figure scenarios") {
    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    const auto sol = solve(prof, 1.0, 0.0, 10.0, 1e-3);
    for (auto [x0, p0] : {std::pair{-3.0, 3.0}, std::pair{2.0, 2.0}}) {
      const auto traj = oracle::integrate_characteristics(prof, x0, p0, 10.0, 1e-3);
      const auto centre = centre_trajectory(sol, x0, p0, traj.times);
      double d = 0;
      for (std::size_t i = 0; i < centre.size(); ++i)
        d = std::max(d, std::hypot(centre[i].x - traj.states[i].first, centre[i].p - traj.states[i].second));
      CHECK(d < 1e-6);
    }
  }

  TEST_CASE("zero-length trajectory") {
    const auto traj = oracle::integrate_characteristics(FrequencyProfile::constant(1.0), 1.0, 2.0, 0.0, 1e-3);
    REQUIRE(traj.times.size() == 1);
    CHECK(traj.states[0] == std::pair{1.0, 2.0});
  }

  TEST_CASE("argument errors") {
    const auto prof = FrequencyProfile::constant(1.0);
    CHECK_THROWS_AS(oracle::integrate_characteristics(prof, 0, 0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(oracle::integrate_characteristics(prof, 0, 0, -1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(oracle::ensemble_moments(prof, {}, 999, 1.0, 0.01, 1), ConfigError);
    CHECK_THROWS_AS(oracle::ensemble_moments(prof, {}, 1000, 1.0, 0.01, 1, 0), ConfigError);
  }

  TEST_CASE("classical invariant drift") {
    const auto c = FrequencyProfile::constant(1.0);
    const auto csol = solve(c, 1.0, 0.0, 10.0, 1e-3);
    CHECK(oracle::invariant_along(csol, oracle::integrate_characteristics(c, -3.0, 3.0, 10.0, 1e-3)) < 1e-9);
    CHECK_THROWS_AS(oracle::invariant_along(csol, oracle::integrate_characteristics(c, 0.0, 0.0, 10.0, 1e-3)),
                    DegenerateInvariant);

    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    auto drift = [&](double h) {
      return oracle::invariant_along(solve(prof, 1.0, 0.0, 10.0, h),
                                     oracle::integrate_characteristics(prof, 2.0, 2.0, 10.0, h));
    };
    const double d1 = drift(1e-3), d2 = drift(2e-3);
    CHECK(d1 < 1e-6);
    CHECK(d2 / d1 == doctest::Approx(16.0).epsilon(0.25));
  }

  TEST_CASE("phase-space area of a small triangle is preserved") {
    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    const double s = 1e-3;
    const auto a = oracle::integrate_characteristics(prof, 0.2, -0.4, 10.0, 1e-3);
    const auto b = oracle::integrate_characteristics(prof, 0.2 + s, -0.4, 10.0, 1e-3);
    const auto c = oracle::integrate_characteristics(prof, 0.2, -0.4 + s, 10.0, 1e-3);
    const std::size_t n = a.times.size() - 1;
    auto area = [&](std::size_t k) {
      return (b.states[k].first - a.states[k].first) * (c.states[k].second - a.states[k].second) -
             (c.states[k].first - a.states[k].first) * (b.states[k].second - a.states[k].second);
    };
    CHECK(area(n) / area(0) == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("normal pairs are counter based") {
    CHECK(oracle::normal_pair(5, 17) == oracle::normal_pair(5, 17));
    CHECK(oracle::normal_pair(5, 17) != oracle::normal_pair(5, 18));
    CHECK(oracle::normal_pair(5, 17) != oracle::normal_pair(6, 17));
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto [a, b] = oracle::normal_pair(3, i);
      sum += a + b;
      sq += a * a + b * b;
    }
    CHECK(std::abs(sum / (2 * n)) < 5 / std::sqrt(2.0 * n));
    CHECK(sq / (2 * n) == doctest::Approx(1.0).epsilon(0.03));
  }

  TEST_CASE("ensemble moments") {
    const auto prof = FrequencyProfile::oscillatory(0.5, 2.5);
    const GaussianState g{2.0, 2.0, 0.5, 0.5};
    const std::size_t n = 4000;
    const auto m = oracle::ensemble_moments(prof, g, n, 10.0, 1e-3, 11, 500);
    REQUIRE(m.size() == 21);
    CHECK(m.back().t == 10.0);
    const double se = 0.5 / std::sqrt(double(n));
    CHECK(std::abs(m[0].mean_x - 2.0) < 5 * se);
    CHECK(std::abs(m[0].mean_p - 2.0) < 5 * se);
    CHECK(std::abs(m[0].var_x - 0.25) < 5 * 0.25 * std::sqrt(2.0 / n));

    SUBCASE("independent of the worker count") {
      const auto one = oracle::ensemble_moments(prof, g, n, 2.0, 1e-3, 11, 100, 1);
      const auto many = oracle::ensemble_moments(prof, g, n, 2.0, 1e-3, 11, 100, 7);
      REQUIRE(one.size() == many.size());
      for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].mean_x == many[i].mean_x);
        CHECK(one[i].var_p == many[i].var_p);
      }
    }
    SUBCASE("mean follows the centre") {
      const auto sol = solve(prof, 1.0, 0.0, 10.0, 1e-3);
      for (const auto& mm : m) {
        const auto [x, p] = eta_at(sol, mm.t).forward(2.0, 2.0);
        CHECK(std::abs(mm.mean_x - x) < 4 * std::sqrt(mm.var_x / n));
        CHECK(std::abs(mm.mean_p - p) < 4 * std::sqrt(mm.var_p / n));
      }
    }
    SUBCASE("rotation keeps var_x + var_p") {
      const auto c = oracle::ensemble_moments(FrequencyProfile::constant(1.0), {-3.0, 3.0, 0.5, 0.5}, n, 10.0,
                                              1e-3, 2, 1000);
      for (const auto& mm : c) CHECK(mm.var_x + mm.var_p == doctest::Approx(c[0].var_x + c[0].var_p).epsilon(1e-9));
    }
  }
}
