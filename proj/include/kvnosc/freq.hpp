#pragma once

#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace kvnosc {

// k(t) = 2 beta^2 / cosh^2(beta t), defined for t >= 0.
struct Hyperbolic {
  double beta;
};

// k(t) = 1 / (gamma + 2t)^2, defined for gamma + 2t > 0.
struct InverseQuadratic {
  double gamma;
};

// k(t) = delta + cos(omega t).
struct Oscillatory {
  double delta;
  double omega;
};

struct Constant {
  double k0;
};

// Piecewise-linear k through (t, k) knots with strictly increasing t.
struct Tabulated {
  std::vector<std::pair<double, double>> knots;
};

/// Time-dependent stiffness k(t) of the oscillator potential U = k(t) x^2 / 2.
///
/// Construct through the named factories; they validate parameters and throw
/// ConfigError on invalid input. Values are immutable after construction.
class FrequencyProfile {
 public:
  using Variant = std::variant<Hyperbolic, InverseQuadratic, Oscillatory, Constant, Tabulated>;

  static FrequencyProfile hyperbolic(double beta);
  static FrequencyProfile inverse_quadratic(double gamma);
  static FrequencyProfile oscillatory(double delta, double omega);
  static FrequencyProfile constant(double k0);
  static FrequencyProfile tabulated(std::vector<std::pair<double, double>> knots);

  double k(double t) const;

  // True only for the variants with closed-form u, rho and phase.
  bool analytic_available() const;

  std::string_view kind() const;
  const Variant& variant() const { return variant_; }

 private:
  explicit FrequencyProfile(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

double evaluate_k(const FrequencyProfile& profile, double t);

// Solution of u'' + k u = 0 together with omega_u = \int dt / u^2.
struct LinearModeSolution {
  double u;
  double u_dot;
  double omega_u;  // -inf where u vanishes (hyperbolic t = 0)
};

struct AnalyticAuxiliary {
  double rho;
  double rho_dot;
  double omega_rho_raw;  // arctan(omega_u), branch taken from atan2(u * omega_u, u)
};

/// Closed-form linear mode. Integration constants: hyperbolic
/// omega_u = t - coth(beta t)/beta, inverse-quadratic omega_u = ln(gamma+2t)/2.
LinearModeSolution analytic_u(const FrequencyProfile& profile, double t);

/// Closed-form Ermakov solution rho = u sqrt(1 + omega_u^2) and its derivative.
///
/// Evaluated as rho^2 = u^2 + v^2 with v = u omega_u written out explicitly,
/// which stays finite through t = 0 for the hyperbolic profile (rho -> 1/beta).
AnalyticAuxiliary analytic_rho(const FrequencyProfile& profile, double t);

/// Accumulated phase \int_{t0}^{t} dt'/rho^2 from the arctan identity.
/// Strictly increasing in t; zero at t == t0.
double omega_rho_from_u(const FrequencyProfile& profile, double t0, double t);

}  // namespace kvnosc
