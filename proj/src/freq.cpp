#include "kvnosc/freq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kvnosc/errors.hpp"

namespace kvnosc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

// u and the second solution v = u * omega_u, with derivatives. The pair has
// unit Wronskian u v' - v u' = 1, which is what makes rho^2 = u^2 + v^2 an
// Ermakov solution with unit right-hand constant.
struct FundamentalPair {
  double u, u_dot, v, v_dot;
};

FundamentalPair fundamental_pair(const FrequencyProfile& profile, double t) {
  return std::visit(
      overloaded{
          [t](const Hyperbolic& h) {
            if (t < 0) throw DomainError("hyperbolic profile requires t >= 0");
            const double b = h.beta;
            const double th = std::tanh(b * t);
            const double sech = 1.0 / std::cosh(b * t);
            const double sech2 = sech * sech;
            // v = tanh(bt) (t - coth(bt)/b) = t tanh(bt) - 1/b
            return FundamentalPair{th, b * sech2, t * th - 1.0 / b, th + b * t * sech2};
          },
          [t](const InverseQuadratic& q) {
            const double s = q.gamma + 2.0 * t;
            if (!(s > 0)) throw DomainError("inverse-quadratic profile requires gamma + 2t > 0");
            const double root = std::sqrt(s);
            const double half_log = 0.5 * std::log(s);
            // v = sqrt(s) ln(s)/2, v' = (ln(s)/2 + 1)/sqrt(s)
            return FundamentalPair{root, 1.0 / root, root * half_log, (half_log + 1.0) / root};
          },
          [](const auto&) -> FundamentalPair {
            throw UnsupportedProfile("no closed-form solution for this frequency profile");
          }},
      profile.variant());
}

}  // namespace

FrequencyProfile FrequencyProfile::hyperbolic(double beta) {
  require_finite(beta, "beta");
  if (!(beta > 0)) throw ConfigError("beta must be positive");
  return FrequencyProfile(Hyperbolic{beta});
}

FrequencyProfile FrequencyProfile::inverse_quadratic(double gamma) {
  require_finite(gamma, "gamma");
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  return FrequencyProfile(InverseQuadratic{gamma});
}

FrequencyProfile FrequencyProfile::oscillatory(double delta, double omega) {
  require_finite(delta, "delta");
  require_finite(omega, "omega");
  return FrequencyProfile(Oscillatory{delta, omega});
}

FrequencyProfile FrequencyProfile::constant(double k0) {
  require_finite(k0, "k0");
  return FrequencyProfile(Constant{k0});
}

FrequencyProfile FrequencyProfile::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ConfigError("tabulated profile needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i].first, "knot time");
    require_finite(knots[i].second, "knot value");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw ConfigError("tabulated knot times must be strictly increasing");
  }
  return FrequencyProfile(Tabulated{std::move(knots)});
}

double FrequencyProfile::k(double t) const {
  return std::visit(
      overloaded{
          [t](const Hyperbolic& h) {
            if (t < 0) throw DomainError("hyperbolic profile requires t >= 0");
            const double c = std::cosh(h.beta * t);
            return 2.0 * h.beta * h.beta / (c * c);
          },
          [t](const InverseQuadratic& q) {
            const double s = q.gamma + 2.0 * t;
            if (!(s > 0)) throw DomainError("inverse-quadratic profile requires gamma + 2t > 0");
            return 1.0 / (s * s);
          },
          [t](const Oscillatory& o) { return o.delta + std::cos(o.omega * t); },
          [](const Constant& c) { return c.k0; },
          [t](const Tabulated& tab) {
            const auto& kn = tab.knots;
            if (t < kn.front().first || t > kn.back().first)
              throw ExtrapolationError("t outside tabulated knot range");
            auto it = std::upper_bound(kn.begin(), kn.end(), t,
                                       [](double v, const auto& knot) { return v < knot.first; });
            if (it == kn.end()) return kn.back().second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (t - lo.first) / (hi.first - lo.first);
            return lo.second + w * (hi.second - lo.second);
          }},
      variant_);
}

bool FrequencyProfile::analytic_available() const {
  return std::holds_alternative<Hyperbolic>(variant_) ||
         std::holds_alternative<InverseQuadratic>(variant_);
}

std::string_view FrequencyProfile::kind() const {
  return std::visit(overloaded{[](const Hyperbolic&) { return std::string_view("hyperbolic"); },
                               [](const InverseQuadratic&) {
                                 return std::string_view("inverse_quadratic");
                               },
                               [](const Oscillatory&) { return std::string_view("oscillatory"); },
                               [](const Constant&) { return std::string_view("constant"); },
                               [](const Tabulated&) { return std::string_view("tabulated"); }},
                    variant_);
}

double evaluate_k(const FrequencyProfile& profile, double t) { return profile.k(t); }

LinearModeSolution analytic_u(const FrequencyProfile& profile, double t) {
  const FundamentalPair f = fundamental_pair(profile, t);
  const double omega_u =
      f.u == 0.0 ? -std::numeric_limits<double>::infinity() : f.v / f.u;
  return {f.u, f.u_dot, omega_u};
}

AnalyticAuxiliary analytic_rho(const FrequencyProfile& profile, double t) {
  const FundamentalPair f = fundamental_pair(profile, t);
  const double rho = std::hypot(f.u, f.v);
  const double rho_dot = (f.u * f.u_dot + f.v * f.v_dot) / rho;
  // u >= 0 on both analytic domains, so atan2 stays on one branch.
  return {rho, rho_dot, std::atan2(f.v, f.u)};
}

double omega_rho_from_u(const FrequencyProfile& profile, double t0, double t) {
  if (t == t0) {
    fundamental_pair(profile, t);  // domain check
    return 0.0;
  }
  const FundamentalPair a = fundamental_pair(profile, t0);
  const FundamentalPair b = fundamental_pair(profile, t);
  // Angle between (u, v) at the two times: the arctan difference without
  // forming arctan(omega_u) at a possibly infinite argument.
  const double cross = a.u * b.v - a.v * b.u;
  const double dot = a.u * b.u + a.v * b.v;
  return std::atan2(cross, dot);
}

}  // namespace kvnosc
