#ifndef POLYSDE_DUAL_HPP
#define POLYSDE_DUAL_HPP

#include <cmath>

namespace polysde {

// First-order forward-mode dual number a + b*eps with eps^2 = 0. Arithmetic
// on the `d` component carries the directional derivative along whatever
// tangent was seeded on the inputs.
struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // tangent

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}
  constexpr Dual(double value, double tangent) : v(value), d(tangent) {}
};

constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
constexpr Dual operator-(Dual a) { return {-a.v, -a.d}; }
constexpr Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

constexpr Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.d - q * b.d) * inv};
}

constexpr Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
constexpr Dual& operator-=(Dual& a, Dual b) { return a = a - b; }
constexpr Dual& operator*=(Dual& a, Dual b) { return a = a * b; }
constexpr Dual& operator/=(Dual& a, Dual b) { return a = a / b; }

constexpr bool operator<(Dual a, Dual b) { return a.v < b.v; }
constexpr bool operator>(Dual a, Dual b) { return a.v > b.v; }
constexpr bool operator<=(Dual a, Dual b) { return a.v <= b.v; }
constexpr bool operator>=(Dual a, Dual b) { return a.v >= b.v; }

inline Dual exp(Dual x) {
  const double e = std::exp(x.v);
  return {e, e * x.d};
}

inline Dual log(Dual x) { return {std::log(x.v), x.d / x.v}; }

inline Dual log1p(Dual x) { return {std::log1p(x.v), x.d / (1.0 + x.v)}; }

inline Dual sqrt(Dual x) {
  const double s = std::sqrt(x.v);
  return {s, 0.5 * x.d / s};
}

inline Dual tanh(Dual x) {
  const double t = std::tanh(x.v);
  return {t, (1.0 - t * t) * x.d};
}

inline Dual sin(Dual x) { return {std::sin(x.v), std::cos(x.v) * x.d}; }
inline Dual cos(Dual x) { return {std::cos(x.v), -std::sin(x.v) * x.d}; }

inline Dual erf(Dual x) {
  // d/dx erf(x) = 2/sqrt(pi) * exp(-x^2)
  constexpr double two_over_sqrt_pi = 1.1283791670955126;
  return {std::erf(x.v), two_over_sqrt_pi * std::exp(-x.v * x.v) * x.d};
}

inline Dual fabs(Dual x) { return x.v < 0.0 ? -x : x; }

constexpr Dual fmax(Dual a, Dual b) { return a.v >= b.v ? a : b; }
constexpr Dual fmin(Dual a, Dual b) { return a.v <= b.v ? a : b; }

// Helpers so generic code can extract the plain value of either scalar type.
constexpr double value_of(double x) { return x; }
constexpr double value_of(Dual x) { return x.v; }

}  // namespace polysde

#endif  // POLYSDE_DUAL_HPP
