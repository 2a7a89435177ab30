#include "kvnosc/koopman_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kvnosc/errors.hpp"

namespace kvnosc {

namespace {

constexpr Complex kI{0.0, 1.0};

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Polynomial

Polynomial Polynomial::monomial(int x_power, int p_power, Complex coeff) {
  Polynomial out;
  out.add(x_power, p_power, coeff);
  return out;
}

Complex Polynomial::coefficient(int x_power, int p_power) const {
  auto it = terms_.find({x_power, p_power});
  return it == terms_.end() ? Complex{} : it->second;
}

void Polynomial::add(int x_power, int p_power, Complex coeff) {
  auto& slot = terms_[{x_power, p_power}];
  slot += coeff;
  if (std::abs(slot) < kPruneThreshold) terms_.erase({x_power, p_power});
}

void Polynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [key, c] : other.terms_) terms_[key] += c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [key, c] : other.terms_) terms_[key] -= c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  for (auto& kv : terms_) kv.second *= s;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_)
      out.terms_[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
  out.prune();
  return out;
}

Complex Polynomial::evaluate(double x, double p) const {
  Complex sum{};
  for (const auto& [key, c] : terms_) sum += c * std::pow(x, key.first) * std::pow(p, key.second);
  return sum;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& kv : terms_) m = std::max(m, std::abs(kv.second));
  return m;
}

// ------------------------------------------------------- PhaseSpaceOperator

PhaseSpaceOperator PhaseSpaceOperator::identity() { return term({}, 1.0); }
PhaseSpaceOperator PhaseSpaceOperator::scalar(Complex c) { return term({}, c); }

PhaseSpaceOperator PhaseSpaceOperator::term(Exponents e, Complex c) {
  if (e.x < 0 || e.p < 0 || e.dx < 0 || e.dp < 0) throw DomainError("negative exponent");
  PhaseSpaceOperator op;
  op.add(e, c);
  return op;
}

PhaseSpaceOperator PhaseSpaceOperator::x() { return term({1, 0, 0, 0}); }
PhaseSpaceOperator PhaseSpaceOperator::p() { return term({0, 1, 0, 0}); }
PhaseSpaceOperator PhaseSpaceOperator::d_x() { return term({0, 0, 1, 0}); }
PhaseSpaceOperator PhaseSpaceOperator::d_p() { return term({0, 0, 0, 1}); }
PhaseSpaceOperator PhaseSpaceOperator::lambda_x() { return term({0, 0, 1, 0}, -kI); }
PhaseSpaceOperator PhaseSpaceOperator::lambda_p() { return term({0, 0, 0, 1}, -kI); }

Complex PhaseSpaceOperator::coefficient(Exponents e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex{} : it->second;
}

int PhaseSpaceOperator::derivative_order() const {
  int order = 0;
  for (const auto& kv : terms_) order = std::max(order, kv.first.dx + kv.first.dp);
  return order;
}

void PhaseSpaceOperator::add(Exponents e, Complex c) {
  auto& slot = terms_[e];
  slot += c;
  if (std::abs(slot) < kPruneThreshold) terms_.erase(e);
}

void PhaseSpaceOperator::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

PhaseSpaceOperator& PhaseSpaceOperator::operator+=(const PhaseSpaceOperator& other) {
  for (const auto& [e, c] : other.terms_) terms_[e] += c;
  prune();
  return *this;
}

PhaseSpaceOperator& PhaseSpaceOperator::operator-=(const PhaseSpaceOperator& other) {
  for (const auto& [e, c] : other.terms_) terms_[e] -= c;
  prune();
  return *this;
}

PhaseSpaceOperator& PhaseSpaceOperator::operator*=(Complex s) {
  for (auto& kv : terms_) kv.second *= s;
  prune();
  return *this;
}

PhaseSpaceOperator operator*(const PhaseSpaceOperator& a, const PhaseSpaceOperator& b) {
  // d^c x^m = sum_j C(c, j) m!/(m-j)! x^(m-j) d^(c-j), independently in x and p.
  PhaseSpaceOperator out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int j = 0; j <= std::min(ea.dx, eb.x); ++j) {
        const double wx = binomial(ea.dx, j) * falling(eb.x, j);
        for (int l = 0; l <= std::min(ea.dp, eb.p); ++l) {
          const double wp = binomial(ea.dp, l) * falling(eb.p, l);
          const Exponents e{ea.x + eb.x - j, ea.p + eb.p - l, ea.dx - j + eb.dx, ea.dp - l + eb.dp};
          out.terms_[e] += ca * cb * (wx * wp);
        }
      }
    }
  }
  out.prune();
  return out;
}

Polynomial PhaseSpaceOperator::apply(const Polynomial& f) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    for (const auto& [key, fc] : f.terms()) {
      const auto [m, n] = key;
      if (e.dx > m || e.dp > n) continue;
      out.add(e.x + m - e.dx, e.p + n - e.dp, c * fc * (falling(m, e.dx) * falling(n, e.dp)));
    }
  }
  return out;
}

double PhaseSpaceOperator::distance(const PhaseSpaceOperator& other) const {
  double d = 0.0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::abs(c - other.coefficient(e)));
  for (const auto& [e, c] : other.terms_)
    if (!terms_.contains(e)) d = std::max(d, std::abs(c));
  return d;
}

PhaseSpaceOperator commutator(const PhaseSpaceOperator& a, const PhaseSpaceOperator& b) {
  return a * b - b * a;
}

// ------------------------------------------------------ physical operators

PhaseSpaceOperator build_liouvillian(double k) {
  using Op = PhaseSpaceOperator;
  return Op::p() * Op::lambda_x() - k * (Op::x() * Op::lambda_p());
}

PhaseSpaceOperator build_invariant(double rho, double rho_dot) {
  if (!(rho > 0)) throw DomainError("invariant requires rho > 0");
  using Op = PhaseSpaceOperator;
  const Op x = Op::x(), p = Op::p(), lx = Op::lambda_x(), lp = Op::lambda_p();
  const double inv_rho2 = 1.0 / (rho * rho);
  const Op pos = rho_dot * x - rho * p;
  const Op aux = rho_dot * lp + rho * lx;
  Op inv = inv_rho2 * (x * x) + pos * pos + inv_rho2 * (lp * lp) + aux * aux;
  return 0.5 * inv;
}

AlphaCoefficients alpha_from_rho(double rho, double rho_dot) {
  const double even = 0.5 * (1.0 / (rho * rho) + rho_dot * rho_dot);
  const double half_rho2 = 0.5 * rho * rho;
  return {{even, half_rho2, half_rho2, even, -rho * rho_dot, rho * rho_dot}};
}

AlphaCoefficients alpha_from_reduction(double rho, double rho_dot, double k) {
  if (!(rho > 0)) throw DomainError("reduction requires rho > 0");
  const double a2 = 0.5 * rho * rho;
  const double a2_dot = rho * rho_dot;
  const double a1 = a2, a1_dot = a2_dot;
  const double a0 = (a2_dot * a2_dot - kEvenConstant) / (4.0 * a2);
  const double a4 = -a2_dot;
  const double a3 = (a1_dot * a1_dot - kOddConstant) / (4.0 * a1);
  // a3 = rho_dot^2/2 - C2/(2 rho^2); differentiate with rho'' from the Ermakov equation.
  const double rho_ddot = kErmakovConstant / (rho * rho * rho) - k * rho;
  const double a3_dot = rho_dot * rho_ddot + kOddConstant * rho_dot / (rho * rho * rho);
  // a5 = -a3'/k; for k = 0 fall back to a5 = a1' from the second equation.
  const double a5 = k != 0.0 ? -a3_dot / k : a1_dot;
  return {{a0, a1, a2, a3, a4, a5}};
}

PhaseSpaceOperator build_invariant(const AlphaCoefficients& a) {
  using Op = PhaseSpaceOperator;
  const Op x = Op::x(), p = Op::p(), lx = Op::lambda_x(), lp = Op::lambda_p();
  return a.alpha[0] * (x * x) + a.alpha[1] * (lx * lx) + a.alpha[2] * (p * p) +
         a.alpha[3] * (lp * lp) + a.alpha[4] * (x * p) + a.alpha[5] * (lx * lp);
}

// ---------------------------------------------------------- invariance checks

namespace {

std::size_t interior_knot(const ErmakovSolution& solution, double t, std::size_t margin) {
  const std::size_t i = solution.knot_index(t);
  if (i == ErmakovSolution::npos) {
    std::ostringstream msg;
    msg << "t = " << t << " is not a grid knot";
    throw OutOfRange(msg.str());
  }
  if (i < margin || i + margin >= solution.size()) {
    std::ostringstream msg;
    msg << "t = " << t << " too close to the grid boundary";
    throw OutOfRange(msg.str());
  }
  return i;
}

}  // namespace

InvariantSample invariant_sample(const ErmakovSolution& solution, double t) {
  const std::size_t i = interior_knot(solution, t, 2);
  const auto& s = solution.samples();
  const double h = (solution.grid()[i + 2] - solution.grid()[i - 2]) / 4.0;
  const double rate =
      (-s[i + 2].rho + 8.0 * s[i + 1].rho - 8.0 * s[i - 1].rho + s[i - 2].rho) / (12.0 * h);
  return {solution.grid()[i], s[i].rho, s[i].rho_dot, rate};
}

double invariance_residual(const FrequencyProfile& profile, const InvariantSample& sample,
                           int test_degree) {
  if (test_degree < 0 || test_degree > 8) throw DomainError("test degree must be in [0, 8]");
  const double rho = sample.rho, rd = sample.rho_dot, r = sample.rho_rate;
  const double k = profile.k(sample.t);
  const PhaseSpaceOperator inv = build_invariant(rho, rd);  // throws DomainError on rho <= 0

  const double rho_ddot = kErmakovConstant / (rho * rho * rho) - k * rho;
  const double even_dot = -r / (rho * rho * rho) + rd * rho_ddot;
  const double mixed_dot = r * rd + rho * rho_ddot;
  const AlphaCoefficients dalpha{{even_dot, rho * r, rho * r, even_dot, -mixed_dot, mixed_dot}};

  const PhaseSpaceOperator residual =
      build_invariant(dalpha) - kI * commutator(inv, build_liouvillian(k));

  double worst = 0.0;
  for (int deg = 0; deg <= test_degree; ++deg)
    for (int a = 0; a <= deg; ++a)
      worst = std::max(worst,
                       residual.apply(Polynomial::monomial(a, deg - a)).max_abs_coefficient());
  return worst;
}

double invariance_residual(const FrequencyProfile& profile, const ErmakovSolution& solution,
                           double t, int test_degree) {
  return invariance_residual(profile, invariant_sample(solution, t), test_degree);
}

std::array<double, 6> alpha_ode_residuals(const ErmakovSolution& solution, double t) {
  const std::size_t i = interior_knot(solution, t, 1);
  const auto& s = solution.samples();
  const double span = solution.grid()[i + 1] - solution.grid()[i - 1];
  const auto lo = alpha_from_rho(s[i - 1].rho, s[i - 1].rho_dot).alpha;
  const auto mid = alpha_from_rho(s[i].rho, s[i].rho_dot).alpha;
  const auto hi = alpha_from_rho(s[i + 1].rho, s[i + 1].rho_dot).alpha;
  std::array<double, 6> d{};
  for (int j = 0; j < 6; ++j) d[j] = (hi[j] - lo[j]) / span;
  const double k = solution.profile().k(solution.grid()[i]);
  return {d[0] - mid[4] * k,
          d[1] - mid[5],
          d[2] + mid[4],
          d[3] + mid[5] * k,
          d[4] + 2.0 * mid[0] - 2.0 * k * mid[2],
          d[5] - 2.0 * mid[3] + 2.0 * k * mid[1]};
}

double reduced_equation_residual(const ErmakovSolution& solution, double t) {
  const std::size_t i = interior_knot(solution, t, 2);
  const auto& s = solution.samples();
  const auto& g = solution.grid();
  const double h = (g[i + 2] - g[i - 2]) / 4.0;
  auto alpha = [&](std::size_t j) { return 0.5 * s[j].rho * s[j].rho; };
  // Fourth-order centred stencils; second order leaves O(h^2) truncation
  // of a few 1e-6 at h = 1e-3 on the oscillatory profile.
  const double am2 = alpha(i - 2), am1 = alpha(i - 1), a = alpha(i), ap1 = alpha(i + 1),
               ap2 = alpha(i + 2);
  const double a_dot = (-ap2 + 8.0 * ap1 - 8.0 * am1 + am2) / (12.0 * h);
  const double a_ddot = (-ap2 + 16.0 * ap1 - 30.0 * a + 16.0 * am1 - am2) / (12.0 * h * h);
  const double k = solution.profile().k(g[i]);
  return a_ddot + 2.0 * k * a - a_dot * a_dot / (2.0 * a) - kReducedConstant / a;
}

// ---------------------------------------------------------------- point maps

Matrix2 Matrix2::inverse() const {
  const double det_v = det();
  if (det_v == 0.0) throw DomainError("singular matrix");
  return {d / det_v, -b / det_v, -c / det_v, a / det_v};
}

double Matrix2::max_abs_diff(const Matrix2& o) const {
  return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

Matrix2 operator*(const Matrix2& l, const Matrix2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
          l.c * r.b + l.d * r.d};
}

Matrix2 matrix_exp(const Matrix2& m) {
  // m = tau I + B with B traceless, B^2 = delta I.
  const double tau = 0.5 * (m.a + m.d);
  const Matrix2 traceless{m.a - tau, m.b, m.c, m.d - tau};
  const double delta = 0.25 * (m.a - m.d) * (m.a - m.d) + m.b * m.c;
  double even = 0.0, odd = 0.0;  // cosh(sqrt delta), sinh(sqrt delta)/sqrt delta
  if (std::abs(delta) < 1e-8) {
    even = 1.0 + delta / 2.0 + delta * delta / 24.0;
    odd = 1.0 + delta / 6.0 + delta * delta / 120.0;
  } else if (delta > 0) {
    const double s = std::sqrt(delta);
    even = std::cosh(s);
    odd = std::sinh(s) / s;
  } else {
    const double s = std::sqrt(-delta);
    even = std::cos(s);
    odd = std::sin(s) / s;
  }
  const double scale = std::exp(tau);
  return {scale * (even + odd * traceless.a), scale * odd * traceless.b, scale * odd * traceless.c,
          scale * (even + odd * traceless.d)};
}

Polynomial PointMap::pullback(const Polynomial& f) const {
  const Polynomial new_x = Polynomial::monomial(1, 0, matrix.a) + Polynomial::monomial(0, 1, matrix.b);
  const Polynomial new_p = Polynomial::monomial(1, 0, matrix.c) + Polynomial::monomial(0, 1, matrix.d);
  Polynomial out;
  for (const auto& [key, c] : f.terms()) {
    Polynomial term = Polynomial::monomial(0, 0, c * amplitude);
    for (int i = 0; i < key.first; ++i) term = term * new_x;
    for (int i = 0; i < key.second; ++i) term = term * new_p;
    out += term;
  }
  return out;
}

PointMap product(const PointMap& left, const PointMap& right) {
  return {right.matrix * left.matrix, left.amplitude * right.amplitude};
}

PointMap exp_action(const PhaseSpaceOperator& generator, double strength) {
  double field[2][2] = {{0, 0}, {0, 0}};  // field[target][source]: d_target gets source coordinate
  Complex constant{};
  for (const auto& [e, raw] : generator.terms()) {
    const Complex c = raw * strength;
    const int order = e.dx + e.dp;
    if (order == 0) {
      if (e.x != 0 || e.p != 0) throw NotAdvection("multiplicative polynomial term in generator");
      constant += c;
      continue;
    }
    if (order > 1) throw NotAdvection("generator has derivative order > 1");
    if (e.x + e.p != 1) throw NotAdvection("generator coefficients are not linear in (x, p)");
    if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c.real())))
      throw NotAdvection("generator is not a real vector field");
    field[e.dx == 1 ? 0 : 1][e.x == 1 ? 0 : 1] += c.real();
  }
  return {matrix_exp({field[0][0], field[0][1], field[1][0], field[1][1]}), std::exp(constant)};
}

PhaseSpaceOperator rotation_generator() {
  using Op = PhaseSpaceOperator;
  return Op::p() * Op::lambda_x() - Op::x() * Op::lambda_p();
}

PhaseSpaceOperator shear_p_generator() {
  return PhaseSpaceOperator::x() * PhaseSpaceOperator::lambda_p();
}

PhaseSpaceOperator shear_x_generator() {
  return PhaseSpaceOperator::p() * PhaseSpaceOperator::lambda_x();
}

PhaseSpaceOperator dilation_x_generator() {
  using Op = PhaseSpaceOperator;
  return Op::x() * Op::lambda_x() + Op::lambda_x() * Op::x();
}

PhaseSpaceOperator dilation_p_generator() {
  using Op = PhaseSpaceOperator;
  return Op::p() * Op::lambda_p() + Op::lambda_p() * Op::p();
}

double verify_disentangling(double theta) {
  if (!(std::abs(theta) < M_PI / 2)) throw DomainError("disentangling requires |theta| < pi/2");
  using Op = PhaseSpaceOperator;
  const double tan_t = std::tan(theta);
  const double log_cos = std::log(std::cos(theta));

  const PointMap lhs = exp_action(-kI * rotation_generator(), theta);

  const Op squeeze = Op::x() * Op::lambda_x() - Op::p() * Op::lambda_p();
  const PointMap first = exp_action(-kI * shear_x_generator(), tan_t);
  const PointMap middle = exp_action(kI * squeeze, log_cos);
  const PointMap last = exp_action(kI * shear_p_generator(), tan_t);
  const PointMap rhs = product(product(first, middle), last);

  double dev = std::max(lhs.matrix.max_abs_diff(rhs.matrix), std::abs(lhs.amplitude - rhs.amplitude));
  for (int deg = 0; deg <= 3; ++deg) {
    for (int a = 0; a <= deg; ++a) {
      const Polynomial mono = Polynomial::monomial(a, deg - a);
      const Polynomial diff = lhs.pullback(mono) - rhs.pullback(mono);
      dev = std::max(dev, diff.max_abs_coefficient());
    }
  }
  return dev;
}

}  // namespace kvnosc
