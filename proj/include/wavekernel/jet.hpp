#pragma once

#include <cmath>

namespace wavekernel {

/// Second-order forward-mode jet: value with first and second derivative.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static Jet constant(double c) { return {c, 0.0, 0.0}; }
  static Jet variable(double x) { return {x, 1.0, 0.0}; }
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet operator/(const Jet& a, const Jet& b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}
inline Jet operator+(const Jet& a, double c) { return {a.v + c, a.d1, a.d2}; }
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { return {a.v - c, a.d1, a.d2}; }
inline Jet operator-(double c, const Jet& a) { return {c - a.v, -a.d1, -a.d2}; }
inline Jet operator*(const Jet& a, double c) { return {a.v * c, a.d1 * c, a.d2 * c}; }
inline Jet operator*(double c, const Jet& a) { return a * c; }
inline Jet operator/(const Jet& a, double c) { return {a.v / c, a.d1 / c, a.d2 / c}; }
inline Jet operator/(double c, const Jet& a) { return Jet::constant(c) / a; }

// Chain rule for a scalar function with derivatives (f, f', f'') at a.v.
inline Jet compose(const Jet& a, double f, double f1, double f2) {
  return {f, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet pow(const Jet& a, double p) {
  const double f = std::pow(a.v, p);
  return compose(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}
inline Jet abs(const Jet& a) { return a.v < 0.0 ? -a : a; }

}  // namespace wavekernel
