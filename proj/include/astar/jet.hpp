#pragma once

#include <cmath>

namespace astar {

/// Value, gradient and Hessian of a scalar field of (w, z).
///
/// Arithmetic propagates the derivatives with the chain rule, so any
/// algebraic expression in jets yields its own first and second partials.
struct Jet {
  double val = 0.0;
  double w = 0.0;
  double z = 0.0;
  double ww = 0.0;
  double wz = 0.0;
  double zz = 0.0;

  static constexpr Jet constant(double v) { return Jet{v, 0, 0, 0, 0, 0}; }
  static constexpr Jet coord_w(double w0) { return Jet{w0, 1, 0, 0, 0, 0}; }
  static constexpr Jet coord_z(double z0) { return Jet{z0, 0, 1, 0, 0, 0}; }

  /// First partial along x^j, j in {1, 3}.
  double d(int j) const { return j == 1 ? w : z; }
  /// Second partial along x^i x^j, i, j in {1, 3}.
  double dd(int i, int j) const {
    if (i == 1 && j == 1) return ww;
    if (i == 3 && j == 3) return zz;
    return wz;
  }
  double laplacian() const { return ww + zz; }
  double grad_sq() const { return w * w + z * z; }
  bool finite() const {
    return std::isfinite(val) && std::isfinite(w) && std::isfinite(z) &&
           std::isfinite(ww) && std::isfinite(wz) && std::isfinite(zz);
  }
};

/// Applies g to a jet given g(v), g'(v), g''(v).
constexpr Jet compose(const Jet& a, double g0, double g1, double g2) {
  return Jet{g0,
             g1 * a.w,
             g1 * a.z,
             g2 * a.w * a.w + g1 * a.ww,
             g2 * a.w * a.z + g1 * a.wz,
             g2 * a.z * a.z + g1 * a.zz};
}

constexpr Jet operator+(const Jet& a, const Jet& b) {
  return Jet{a.val + b.val, a.w + b.w,   a.z + b.z,
             a.ww + b.ww,   a.wz + b.wz, a.zz + b.zz};
}
constexpr Jet operator-(const Jet& a, const Jet& b) {
  return Jet{a.val - b.val, a.w - b.w,   a.z - b.z,
             a.ww - b.ww,   a.wz - b.wz, a.zz - b.zz};
}
constexpr Jet operator-(const Jet& a) {
  return Jet{-a.val, -a.w, -a.z, -a.ww, -a.wz, -a.zz};
}
constexpr Jet operator*(const Jet& a, const Jet& b) {
  return Jet{a.val * b.val,
             a.w * b.val + a.val * b.w,
             a.z * b.val + a.val * b.z,
             a.ww * b.val + 2.0 * a.w * b.w + a.val * b.ww,
             a.wz * b.val + a.w * b.z + a.z * b.w + a.val * b.wz,
             a.zz * b.val + 2.0 * a.z * b.z + a.val * b.zz};
}
constexpr Jet operator*(double s, const Jet& a) {
  return Jet{s * a.val, s * a.w, s * a.z, s * a.ww, s * a.wz, s * a.zz};
}
constexpr Jet operator*(const Jet& a, double s) { return s * a; }
constexpr Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.val += s;
  return r;
}
constexpr Jet operator+(double s, const Jet& a) { return a + s; }
constexpr Jet operator-(const Jet& a, double s) { return a + (-s); }
constexpr Jet operator-(double s, const Jet& a) { return (-a) + s; }

constexpr Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.val;
  return compose(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
constexpr Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
constexpr Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
constexpr Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.val);
  return compose(a, e, e, e);
}
inline Jet log(const Jet& a) {
  const double inv = 1.0 / a.val;
  return compose(a, std::log(a.val), inv, -inv * inv);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.val);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.val));
}
inline Jet pow(const Jet& a, double p) {
  const double v = std::pow(a.val, p - 2.0);
  return compose(a, v * a.val * a.val, p * v * a.val, p * (p - 1.0) * v);
}
inline Jet sin(const Jet& a) {
  const double s = std::sin(a.val), c = std::cos(a.val);
  return compose(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.val), c = std::cos(a.val);
  return compose(a, c, -s, -c);
}
constexpr Jet square(const Jet& a) { return a * a; }

/// Sum over j in {1, 3} of d_j a * d_j b.
constexpr double grad_dot(const Jet& a, const Jet& b) {
  return a.w * b.w + a.z * b.z;
}

}  // namespace astar
