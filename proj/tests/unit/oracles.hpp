#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <functional>
#include <utility>

#include "kvnosc/koopman_ops.hpp"

namespace oracles {

// rho for k = 2 beta^2 / cosh^2(beta t), explicit form:
// tanh(bt) sqrt(1 + [bt - coth(bt)]^2 / b^2). Limit 1/b at t = 0.
inline double explicit_rho_hyperbolic(double beta, double t) {
  if (t == 0.0) return 1.0 / beta;
  const double th = std::tanh(beta * t);
  const double w = beta * t - 1.0 / th;
  return th * std::sqrt(1.0 + w * w / (beta * beta));
}

// rho for k = 1/(gamma + 2t)^2, explicit form: sqrt(s [1 + ln^2(s)/4]), s = gamma + 2t.
inline double explicit_rho_inverse_quadratic(double gamma, double t) {
  const double s = gamma + 2.0 * t;
  const double l = std::log(s);
  return std::sqrt(s * (1.0 + 0.25 * l * l));
}

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Exact flow of x' = p, p' = -x: rotation by t.
inline std::pair<double, double> rotate(double x, double p, double t) {
  return {x * std::cos(t) + p * std::sin(t), -x * std::sin(t) + p * std::cos(t)};
}

// exp(s G) f by the truncated power series sum (s G)^n f / n!.
inline kvnosc::Polynomial exp_series(const kvnosc::PhaseSpaceOperator& g, double s,
                                     const kvnosc::Polynomial& f, int terms = 60) {
  kvnosc::Polynomial sum = f, term = f;
  for (int n = 1; n < terms; ++n) {
    term = g.apply(term);
    term *= s / n;
    sum += term;
  }
  return sum;
}

// Coefficient of (x^a p^b d_x^c d_p^d) in
// 1/2 [x^2/rho^2 + (rho_dot x - rho p)^2 + lp^2/rho^2 + (rho_dot lp + rho lx)^2],
// expanded by hand with l = -i d so that l_i l_j = -d_i d_j.
inline double invariant_term(double rho, double rho_dot, int a, int b, int c, int d) {
  const double even = 0.5 / (rho * rho) + 0.5 * rho_dot * rho_dot;
  if (a == 2 && b == 0 && c == 0 && d == 0) return even;
  if (a == 0 && b == 2 && c == 0 && d == 0) return 0.5 * rho * rho;
  if (a == 1 && b == 1 && c == 0 && d == 0) return -rho * rho_dot;
  if (a == 0 && b == 0 && c == 0 && d == 2) return -even;
  if (a == 0 && b == 0 && c == 2 && d == 0) return -0.5 * rho * rho;
  if (a == 0 && b == 0 && c == 1 && d == 1) return -rho * rho_dot;
  return 0.0;
}

}  // namespace oracles
