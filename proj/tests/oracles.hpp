#pragma once

// Independent reference computations shared by the unit tests.

#include <array>
#include <cmath>

#include "astar/tensor_core.hpp"

namespace oracle {

using astar::Matrix4;

inline Matrix4 lower_at(const astar::MetricSampler& s, double w, double z) {
  const astar::MetricJet j = s(w, z);
  const double e2F = std::exp(2.0 * j.F.val);
  const double A = j.A.val, Pi = j.Pi.val;
  Matrix4 g{};
  g[0][0] = e2F;
  g[0][2] = g[2][0] = e2F * A;
  g[1][1] = g[3][3] = -std::exp(2.0 * (j.K.val - j.F.val));
  g[2][2] = e2F * A * A - Pi * Pi / e2F;
  return g;
}

/// Inverse of the block metric: 2x2 (t, phi) block plus the diagonal.
inline Matrix4 upper_of(const Matrix4& g) {
  Matrix4 u{};
  const double det = g[0][0] * g[2][2] - g[0][2] * g[0][2];
  u[0][0] = g[2][2] / det;
  u[2][2] = g[0][0] / det;
  u[0][2] = u[2][0] = -g[0][2] / det;
  u[1][1] = 1.0 / g[1][1];
  u[3][3] = 1.0 / g[3][3];
  return u;
}

/// Gamma^mu_{nu la} from central differences of the metric.
inline std::array<double, 64> christoffel_fd(const astar::MetricSampler& s,
                                             double w, double z, double h) {
  double dg[4][4][4] = {};
  const Matrix4 wp = lower_at(s, w + h, z), wm = lower_at(s, w - h, z);
  const Matrix4 zp = lower_at(s, w, z + h), zm = lower_at(s, w, z - h);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      dg[1][a][b] = (wp[a][b] - wm[a][b]) / (2.0 * h);
      dg[3][a][b] = (zp[a][b] - zm[a][b]) / (2.0 * h);
    }
  }
  const Matrix4 gi = upper_of(lower_at(s, w, z));
  std::array<double, 64> G{};
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      for (int l = 0; l < 4; ++l) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) {
          v += 0.5 * gi[m][a] * (dg[l][a][n] + dg[n][a][l] - dg[a][n][l]);
        }
        G[16 * m + 4 * n + l] = v;
      }
    }
  }
  return G;
}

}  // namespace oracle

namespace oracle {

/// Kerr vacuum in Weyl-Papapetrou form with Pi = w, mass m and a = J/m.
/// Prolate coordinates x, y follow from the distances to the rod ends.
inline astar::MetricJet kerr(double m, double a, double w, double z) {
  using astar::Jet;
  const double s = std::sqrt(m * m - a * a);
  const double p = s / m, q = a / m;
  const Jet W = Jet::coord_w(w), Z = Jet::coord_z(z);
  const Jet rp = sqrt(W * W + (Z + s) * (Z + s));
  const Jet rm = sqrt(W * W + (Z - s) * (Z - s));
  const Jet x = (rp + rm) / (2.0 * s);
  const Jet y = (rp - rm) / (2.0 * s);
  const Jet num = p * p * x * x + q * q * y * y - 1.0;
  const Jet den = (p * x + 1.0) * (p * x + 1.0) + q * q * y * y;
  const Jet f = num / den;
  const Jet omega = 2.0 * m * q * (1.0 - y * y) * (p * x + 1.0) / num;
  const Jet e2g = num / (p * p * (x * x - y * y));
  astar::MetricJet out;
  out.F = 0.5 * log(f);
  out.A = -omega;
  out.K = 0.5 * log(e2g);
  out.Pi = W;
  return out;
}

/// Curzon vacuum: F = -m / r, A = 0, Pi = w and
/// K = -m^2 w^2 / (2 r^4).
inline astar::MetricJet curzon(double m, double w, double z) {
  using astar::Jet;
  const Jet W = Jet::coord_w(w), Z = Jet::coord_z(z);
  const Jet r2 = W * W + Z * Z;
  astar::MetricJet out;
  out.F = -m / sqrt(r2);
  out.A = Jet::constant(0.0);
  out.K = -0.5 * m * m * W * W / (r2 * r2);
  out.Pi = W;
  return out;
}

}  // namespace oracle
