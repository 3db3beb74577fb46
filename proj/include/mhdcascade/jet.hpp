#pragma once

#include <cmath>

#include "mhdcascade/types.hpp"

namespace mhdc {

// Value, gradient and Hessian of a scalar function of x in R^3.
struct Jet {
  double v = 0;
  Vec3 g;
  Mat3 H;

  static Jet constant(double c) { return Jet{c, {}, {}}; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.g + b.g, a.H + b.H}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.g - b.g, a.H - b.H}; }
inline Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.g, s * a.H}; }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.H = a.v * b.H + b.v * a.H + outer(a.g, b.g) + outer(b.g, a.g);
  return r;
}

// f(a) given f, f', f'' at a.v.
inline Jet compose(const Jet& a, double f, double f1, double f2) {
  return {f, f1 * a.g, f2 * outer(a.g, a.g) + f1 * a.H};
}

// |x - c|, requires x != c.
inline Jet distance_jet(const Vec3& x, const Vec3& c) {
  const Vec3 d = x - c;
  const double r = norm(d);
  const Vec3 u = d / r;
  return {r, u, (1.0 / r) * (Mat3::identity() - outer(u, u))};
}

// Angle between x and the unit axis e, as atan2(perpendicular, axial).
// Requires a nonzero perpendicular component.
inline Jet angle_jet(const Vec3& x, const Vec3& e) {
  const double p = dot(x, e);
  const Vec3 px = x - p * e;
  const double q = norm(px);
  const Vec3 gq = px / q;
  const Mat3 P = Mat3::identity() - outer(e, e);
  const Mat3 Hq = (1.0 / q) * (P - outer(gq, gq));
  const double s = p * p + q * q;
  const double tp = -q / s, tq = p / s;
  const double tpp = 2 * p * q / (s * s), tqq = -2 * p * q / (s * s), tpq = (q * q - p * p) / (s * s);
  Jet r;
  r.v = std::atan2(q, p);
  r.g = tp * e + tq * gq;
  r.H = tpp * outer(e, e) + tqq * outer(gq, gq) + tpq * (outer(e, gq) + outer(gq, e)) + tq * Hq;
  return r;
}

}  // namespace mhdc
