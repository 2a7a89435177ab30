#pragma once

#include <array>
#include <compare>
#include <complex>
#include <map>
#include <utility>

#include "kvnosc/ermakov.hpp"
#include "kvnosc/freq.hpp"

namespace kvnosc {

using Complex = std::complex<double>;

// Coefficients below this magnitude are dropped after every operation.
inline constexpr double kPruneThreshold = 1e-14;

/// Polynomial in the commuting phase-space variables x, p.
class Polynomial {
 public:
  using Key = std::pair<int, int>;  // (power of x, power of p)

  Polynomial() = default;
  static Polynomial monomial(int x_power, int p_power, Complex coeff = 1.0);

  const std::map<Key, Complex>& terms() const { return terms_; }
  Complex coefficient(int x_power, int p_power) const;
  void add(int x_power, int p_power, Complex coeff);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }

  Complex evaluate(double x, double p) const;
  double max_abs_coefficient() const;

 private:
  void prune();
  std::map<Key, Complex> terms_;
};

/// Exponents of one normal-ordered term x^a p^b d_x^c d_p^d (derivatives rightmost).
struct Exponents {
  int x = 0;
  int p = 0;
  int dx = 0;
  int dp = 0;
  auto operator<=>(const Exponents&) const = default;
};

/// Linear differential operator on functions of (x, p) with polynomial
/// coefficients, kept in normal order. lambda_x and lambda_p are realised as
/// -i d/dx and -i d/dp, so [x, lambda_x] = [p, lambda_p] = i.
class PhaseSpaceOperator {
 public:
  PhaseSpaceOperator() = default;

  static PhaseSpaceOperator identity();
  static PhaseSpaceOperator scalar(Complex c);
  static PhaseSpaceOperator term(Exponents e, Complex c = 1.0);
  static PhaseSpaceOperator x();
  static PhaseSpaceOperator p();
  static PhaseSpaceOperator d_x();
  static PhaseSpaceOperator d_p();
  static PhaseSpaceOperator lambda_x();
  static PhaseSpaceOperator lambda_p();

  const std::map<Exponents, Complex>& terms() const { return terms_; }
  Complex coefficient(Exponents e) const;
  bool is_zero() const { return terms_.empty(); }
  int derivative_order() const;

  PhaseSpaceOperator& operator+=(const PhaseSpaceOperator& other);
  PhaseSpaceOperator& operator-=(const PhaseSpaceOperator& other);
  PhaseSpaceOperator& operator*=(Complex s);
  friend PhaseSpaceOperator operator+(PhaseSpaceOperator a, const PhaseSpaceOperator& b) {
    return a += b;
  }
  friend PhaseSpaceOperator operator-(PhaseSpaceOperator a, const PhaseSpaceOperator& b) {
    return a -= b;
  }
  friend PhaseSpaceOperator operator-(PhaseSpaceOperator a) { return a *= -1.0; }
  friend PhaseSpaceOperator operator*(Complex s, PhaseSpaceOperator a) { return a *= s; }
  friend PhaseSpaceOperator operator*(PhaseSpaceOperator a, Complex s) { return a *= s; }
  // Operator composition (a applied after b), normal ordered.
  friend PhaseSpaceOperator operator*(const PhaseSpaceOperator& a, const PhaseSpaceOperator& b);

  Polynomial apply(const Polynomial& f) const;

  // Max coefficient difference, over the union of terms.
  double distance(const PhaseSpaceOperator& other) const;

 private:
  void add(Exponents e, Complex c);
  void prune();
  std::map<Exponents, Complex> terms_;
};

PhaseSpaceOperator commutator(const PhaseSpaceOperator& a, const PhaseSpaceOperator& b);

/// L = p lambda_x - k x lambda_p.
PhaseSpaceOperator build_liouvillian(double k);

/// I = 1/2 [x^2/rho^2 + (rho_dot x - rho p)^2 + lambda_p^2/rho^2 + (rho_dot lambda_p + rho lambda_x)^2],
/// assembled from operator products. Throws DomainError for rho <= 0.
PhaseSpaceOperator build_invariant(double rho, double rho_dot);

/// Coefficients of the quadratic ansatz
/// I = a0 x^2 + a1 lx^2 + a2 p^2 + a3 lp^2 + a4 x p + a5 lx lp.
struct AlphaCoefficients {
  std::array<double, 6> alpha{};
};

// Integration constants for which the even/odd reductions reproduce the
// invariant above. With alpha = rho^2/2 the conserved combinations give
// alpha4^2 - 4 alpha0 alpha2 = alpha5^2 - 4 alpha3 alpha1 = -1, and the
// single-coefficient equation then carries C = -C1/2.
inline constexpr double kEvenConstant = -1.0;       // C1
inline constexpr double kOddConstant = -1.0;        // C2
inline constexpr double kReducedConstant = 0.5;     // C in a'' + 2ka = a'^2/(2a) + C/a
inline constexpr double kErmakovConstant = 1.0;     // rho'' + k rho = 1/rho^3

AlphaCoefficients alpha_from_rho(double rho, double rho_dot);

// a0 from a2 via (a2'^2 - C1)/(4 a2), a4 = -a2', and a3, a5 likewise from a1.
AlphaCoefficients alpha_from_reduction(double rho, double rho_dot, double k);

PhaseSpaceOperator build_invariant(const AlphaCoefficients& a);

/// Trajectory data needed for dI/dt: the sample (rho, rho_dot) that builds I,
/// plus an independent measurement of d(rho)/dt. For an exact Ermakov
/// solution rho_rate == rho_dot.
struct InvariantSample {
  double t;
  double rho;
  double rho_dot;
  double rho_rate;
};

/// Sample at a grid knot of `solution`, with rho_rate from a five-point
/// centred difference of the rho track. Throws OutOfRange within two knots
/// of either end or when t is not a knot.
InvariantSample invariant_sample(const ErmakovSolution& solution, double t);

/// dI/dt - i[I, L] applied to every monomial x^a p^b with a + b <= degree;
/// returns the largest coefficient magnitude among the results.
/// rho_ddot in dI/dt comes from the Ermakov equation. Degree capped at 8.
double invariance_residual(const FrequencyProfile& profile, const InvariantSample& sample,
                           int test_degree = 4);
double invariance_residual(const FrequencyProfile& profile, const ErmakovSolution& solution,
                           double t, int test_degree = 4);

/// Residuals of the six coupled coefficient equations at knot t, with alpha
/// derivatives from centred differences on neighbouring knots.
std::array<double, 6> alpha_ode_residuals(const ErmakovSolution& solution, double t);

/// Residual of a'' + 2ka - a'^2/(2a) - C/a for a = rho^2/2, C = kReducedConstant,
/// derivatives by five-point centred differences on the grid.
double reduced_equation_residual(const ErmakovSolution& solution, double t);

/// 2x2 real matrix, row major.
struct Matrix2 {
  double a = 1, b = 0, c = 0, d = 1;

  static Matrix2 identity() { return {}; }
  double det() const { return a * d - b * c; }
  Matrix2 inverse() const;
  std::pair<double, double> apply(double x, double p) const { return {a * x + b * p, c * x + d * p}; }
  double max_abs_diff(const Matrix2& o) const;
  friend Matrix2 operator*(const Matrix2& l, const Matrix2& r);
};

Matrix2 matrix_exp(const Matrix2& m);

/// Action of an exponential as a substitution: (e^G psi)(x, p) = amplitude * psi(M (x, p)).
struct PointMap {
  Matrix2 matrix;
  Complex amplitude = 1.0;

  double det() const { return matrix.det(); }
  static PointMap identity() { return {}; }
  std::pair<double, double> apply(double x, double p) const { return matrix.apply(x, p); }
  Polynomial pullback(const Polynomial& f) const;
};

/// Map of the operator product left * right (right acts first):
/// psi -> psi o (M_right M_left).
PointMap product(const PointMap& left, const PointMap& right);

/// Substitution induced by exp(strength * generator). The generator must be
/// a real linear vector field sum_j (A z)_j d_j plus an optional constant.
/// Throws NotAdvection otherwise.
PointMap exp_action(const PhaseSpaceOperator& generator, double strength = 1.0);

/// exp(-i theta (p lx - x lp)) versus
/// exp(-i tan(theta) p lx) exp(i ln(cos theta)(x lx - p lp)) exp(i tan(theta) x lp):
/// max deviation over matrix entries and over the pullbacks of all monomials
/// of degree <= 3. Throws DomainError for |theta| >= pi/2.
double verify_disentangling(double theta);

// Generators used by the propagator.
PhaseSpaceOperator rotation_generator();  // p lx - x lp
PhaseSpaceOperator shear_p_generator();   // x lp
PhaseSpaceOperator shear_x_generator();   // p lx
PhaseSpaceOperator dilation_x_generator();  // x lx + lx x
PhaseSpaceOperator dilation_p_generator();  // p lp + lp p

}  // namespace kvnosc
