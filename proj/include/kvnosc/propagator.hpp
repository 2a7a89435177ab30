#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kvnosc/ermakov.hpp"
#include "kvnosc/koopman_ops.hpp"

namespace kvnosc {

/// Linear substitution of the invariant-based solution:
/// psi(x, p; t) = psi(x eta1 - p eta2, x eta3 + p eta4; 0).
struct EtaMap {
  double eta1 = 1, eta2 = 0, eta3 = 0, eta4 = 1;
  double t = 0;

  // [[eta1, -eta2], [eta3, eta4]]
  Matrix2 matrix() const { return {eta1, -eta2, eta3, eta4}; }
  double det() const { return eta1 * eta4 + eta2 * eta3; }
  // Point carried forward by the flow: M^{-1} z with det M = 1.
  std::pair<double, double> forward(double x, double p) const {
    return {eta4 * x + eta2 * p, -eta3 * x + eta1 * p};
  }
  std::pair<double, double> pull(double x, double p) const {
    return {x * eta1 - p * eta2, x * eta3 + p * eta4};
  }
};

struct GammaCoefficients {
  double gamma1, gamma2, gamma3, gamma4;
};

/// Normalised product Gaussian density in phase space.
struct GaussianState {
  double xc = 0;
  double pc = 0;
  double sigma_x = 0.5;
  double sigma_p = 0.5;

  double density(double x, double p) const;
};

EtaMap eta_at(const ErmakovSolution& solution, double t);

GammaCoefficients gamma_at(double rho0, double rho_dot0, double omega_rho);

/// Gamma_t(x, p) = Gamma_0(x eta1 - p eta2, x eta3 + p eta4).
double evolve_density(const GaussianState& state0, const EtaMap& map, double x, double p);

struct CentrePoint {
  double t, x, p;
};

/// Centre of the pulled-back density: M(t)^{-1} (xc0, pc0).
std::vector<CentrePoint> centre_trajectory(const ErmakovSolution& solution, double xc0, double pc0,
                                           std::span<const double> times);

/// T1^dag(t) T2^dag(t) exp(-i w (p lx - x lp)) T2(0) T1(0), each factor built
/// with exp_action and composed as point maps.
PointMap assemble_full_propagator(const ErmakovSolution& solution, double t);

/// I_cl = 1/2 [(x/rho)^2 + (rho_dot x - rho p)^2].
double classical_invariant(double rho, double rho_dot, double x, double p);

struct GridWindow {
  double x_min, x_max, p_min, p_max;
};

struct DensityGrid {
  GridWindow window;
  std::size_t nx = 0, np = 0;
  std::vector<double> xs, ps;
  std::vector<double> values;  // row-major, index ix * np + ip

  double cell_area() const;
  double mass() const;  // midpoint-rule quadrature
  double at(std::size_t ix, std::size_t ip) const { return values[ix * np + ip]; }
};

/// Evolved centre +/- `widths` standard deviations of the evolved covariance.
GridWindow default_window(const GaussianState& state0, const EtaMap& map, double widths = 6.0);

/// Smallest n for which cells over default_window(.., widths) are no wider
/// than the conditional standard deviations of the evolved density, so that
/// midpoint quadrature stays accurate for strongly sheared states.
std::size_t resolving_grid_size(const GaussianState& state0, const EtaMap& map, double widths = 6.0);

/// Cell-centred n x n grid of the evolved density over `window`.
DensityGrid evaluate_grid(const GaussianState& state0, const EtaMap& map, const GridWindow& window,
                          std::size_t n = 256);

}  // namespace kvnosc
