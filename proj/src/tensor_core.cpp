#include "astar/tensor_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "astar/errors.hpp"

namespace astar {

double Constants::coupling() const {
  return 8.0 * std::numbers::pi * G / (c * c * c * c);
}

void Constants::validate() const {
  if (!(c > 0.0) || !(G > 0.0) || !std::isfinite(c) || !std::isfinite(G)) {
    fail(ErrorKind::config, "units.c and units.G must be finite and positive");
  }
}

void validate(const MetricJet& jet) {
  if (!jet.F.finite() || !jet.A.finite() || !jet.K.finite() ||
      !jet.Pi.finite()) {
    fail(ErrorKind::invalid_jet, "metric jet has non-finite entries");
  }
  if (!(jet.Pi.val > kAxisEpsilon)) {
    std::ostringstream os;
    os << "Pi = " << jet.Pi.val << " is at or below the axis threshold";
    fail(ErrorKind::axis_singularity, os.str());
  }
}

LewisState lanczos_to_lewis(const MetricJet& jet) {
  validate(jet);
  const Jet f = exp(2.0 * jet.F);
  const Jet finv = exp(-2.0 * jet.F);
  LewisState ls;
  ls.f = f;
  ls.k = -(f * jet.A);
  ls.l = finv * square(jet.Pi) - f * square(jet.A);
  ls.m = 2.0 * (jet.K - jet.F);
  return ls;
}

Jet pi_from_lewis(const LewisState& ls) {
  const Jet pi2 = ls.f * ls.l + square(ls.k);
  if (!(pi2.val > kAxisEpsilon * kAxisEpsilon)) {
    fail(ErrorKind::degenerate_metric, "f l + k^2 is not positive");
  }
  return sqrt(pi2);
}

MetricJet lewis_to_lanczos(const LewisState& ls) {
  if (!(ls.f.val > 0.0)) {
    fail(ErrorKind::degenerate_metric, "f must be positive");
  }
  const Jet F = 0.5 * log(ls.f);
  return MetricJet{F, -(ls.k / ls.f), 0.5 * ls.m + F, pi_from_lewis(ls)};
}

MetricComponents metric_components(const MetricJet& jet) {
  validate(jet);
  const double e2F = std::exp(2.0 * jet.F.val);
  const double A = jet.A.val;
  const double Pi2 = jet.Pi.val * jet.Pi.val;
  const double g22 = e2F * A * A - Pi2 / e2F;
  MetricComponents g;
  g.lower[0][0] = e2F;
  g.lower[0][2] = g.lower[2][0] = e2F * A;
  g.lower[1][1] = g.lower[3][3] = -std::exp(2.0 * (jet.K.val - jet.F.val));
  g.lower[2][2] = g22;
  g.upper[0][0] = -g22 / Pi2;
  g.upper[0][2] = g.upper[2][0] = e2F * A / Pi2;
  g.upper[1][1] = g.upper[3][3] = -std::exp(2.0 * (jet.F.val - jet.K.val));
  g.upper[2][2] = -e2F / Pi2;
  return g;
}

MetricComponents metric_components(const LewisState& ls) {
  const double f = ls.f.val, k = ls.k.val, l = ls.l.val;
  const double Pi2 = f * l + k * k;
  if (!(Pi2 > 0.0)) {
    fail(ErrorKind::degenerate_metric, "f l + k^2 is not positive");
  }
  MetricComponents g;
  g.lower[0][0] = f;
  g.lower[0][2] = g.lower[2][0] = -k;
  g.lower[2][2] = -l;
  g.lower[1][1] = g.lower[3][3] = -std::exp(ls.m.val);
  g.upper[0][0] = l / Pi2;
  g.upper[0][2] = g.upper[2][0] = -k / Pi2;
  g.upper[2][2] = -f / Pi2;
  g.upper[1][1] = g.upper[3][3] = -std::exp(-ls.m.val);
  return g;
}

Christoffel christoffel_lanczos(const MetricJet& jet) {
  validate(jet);
  const double F = jet.F.val, A = jet.A.val, K = jet.K.val, Pi = jet.Pi.val;
  const double Pi2 = Pi * Pi;
  const double e2F = std::exp(2.0 * F);
  const double e4F = e2F * e2F;
  const double e2FmK = std::exp(2.0 * (F - K));

  Christoffel G;
  for (int j : {1, 3}) {
    const double Fj = jet.F.d(j), Aj = jet.A.d(j);
    const double Pij = jet.Pi.d(j);

    G.set_sym(0, 0, j, e4F * A * Aj / (2.0 * Pi2) + Fj);
    G.set_sym(0, 2, j,
              0.5 * Aj - A * Pij / Pi + 2.0 * A * Fj +
                  e4F * A * A * Aj / (2.0 * Pi2));

    G(j, 0, 0) = e4F * std::exp(-2.0 * K) * Fj;
    G.set_sym(j, 0, 2, 0.5 * e2FmK * e2F * (2.0 * Fj * A + Aj));
    G(j, 2, 2) = 0.5 * e2FmK *
                 (e2F * (2.0 * Fj * A * A + 2.0 * A * Aj) -
                  (-2.0 * Fj * Pi2 + 2.0 * Pi * Pij) / e2F);

    G.set_sym(2, 0, j, -e4F * Aj / (2.0 * Pi2));
    G.set_sym(2, 2, j, -e4F * A * Aj / (2.0 * Pi2) - Fj + Pij / Pi);
  }
  const double D1 = jet.F.w - jet.K.w;  // d_1(F - K)
  const double D3 = jet.F.z - jet.K.z;
  G(1, 1, 1) = -D1;
  G.set_sym(1, 1, 3, -D3);
  G(1, 3, 3) = D1;
  G(3, 1, 1) = D3;
  G.set_sym(3, 1, 3, -D1);
  G(3, 3, 3) = -D3;
  return G;
}

Christoffel christoffel_lewis(const LewisState& ls) {
  const double f = ls.f.val, k = ls.k.val, l = ls.l.val;
  const double Pi2 = f * l + k * k;
  if (!(Pi2 > 0.0)) {
    fail(ErrorKind::degenerate_metric, "f l + k^2 is not positive");
  }
  const double emm = std::exp(-ls.m.val);

  Christoffel G;
  for (int j : {1, 3}) {
    const double fj = ls.f.d(j), kj = ls.k.d(j), lj = ls.l.d(j);
    G.set_sym(0, 0, j, (l * fj + k * kj) / (2.0 * Pi2));
    G.set_sym(0, 2, j, (k * lj - l * kj) / (2.0 * Pi2));
    G(j, 0, 0) = 0.5 * emm * fj;
    G.set_sym(j, 0, 2, -0.5 * emm * kj);
    G(j, 2, 2) = -0.5 * emm * lj;
    G.set_sym(2, 0, j, (f * kj - k * fj) / (2.0 * Pi2));
    G.set_sym(2, 2, j, (f * lj + k * kj) / (2.0 * Pi2));
  }
  const double m1 = ls.m.w, m3 = ls.m.z;
  G(1, 1, 1) = 0.5 * m1;
  G.set_sym(1, 1, 3, 0.5 * m3);
  G(1, 3, 3) = -0.5 * m1;
  G(3, 1, 1) = -0.5 * m3;
  G.set_sym(3, 1, 3, 0.5 * m1);
  G(3, 3, 3) = 0.5 * m3;
  return G;
}

double sigma(const LewisState& ls) {
  return ls.f.w * ls.l.w + ls.f.z * ls.l.z + ls.k.w * ls.k.w +
         ls.k.z * ls.k.z;
}

double sigma_from_lanczos(const MetricJet& jet) {
  const double e4F = std::exp(4.0 * jet.F.val);
  const double Pi = jet.Pi.val;
  double s = 0.0;
  for (int j : {1, 3}) {
    const double Fj = jet.F.d(j), Aj = jet.A.d(j), Pij = jet.Pi.d(j);
    s += e4F * Aj * Aj - 4.0 * Fj * Fj * Pi * Pi + 4.0 * Pi * Pij * Fj;
  }
  return s;
}

namespace {

// sum over j of d_j (d_j a / Pi)
double div_grad_over_pi(const Jet& a, const Jet& Pi) {
  return a.laplacian() / Pi.val - grad_dot(a, Pi) / (Pi.val * Pi.val);
}

}  // namespace

RicciComponents ricci_closed_form(const LewisState& ls) {
  const Jet Pi = pi_from_lewis(ls);
  if (!(Pi.val > kAxisEpsilon)) {
    fail(ErrorKind::axis_singularity, "Pi vanishes");
  }
  const double p = Pi.val;
  const double S = sigma(ls);
  const double pref = p / (2.0 * std::exp(ls.m.val));
  const Jet& f = ls.f;
  const Jet& k = ls.k;
  const Jet& l = ls.l;
  const Jet& m = ls.m;

  RicciComponents R;
  R.R00 = pref * (div_grad_over_pi(f, Pi) + f.val * S / (p * p * p));
  R.R02 = -pref * (div_grad_over_pi(k, Pi) + k.val * S / (p * p * p));
  R.R22 = -pref * (div_grad_over_pi(l, Pi) + l.val * S / (p * p * p));

  const double lap_m = m.ww + m.zz;
  const double cross = (m.w * Pi.w - m.z * Pi.z) / p;
  R.R11 = 0.5 * (-lap_m - 2.0 * Pi.ww / p + cross +
                 (f.w * l.w + k.w * k.w) / (p * p));
  R.R33 = 0.5 * (-lap_m - 2.0 * Pi.zz / p - cross +
                 (f.z * l.z + k.z * k.z) / (p * p));
  R.R13 = 0.5 * (-2.0 * Pi.wz / p + (m.z * Pi.w + m.w * Pi.z) / p +
                 (f.w * l.z + l.w * f.z + 2.0 * k.w * k.z) / (2.0 * p * p));
  return R;
}

namespace {

Matrix4 invert4(const Matrix4& m) {
  // Gauss-Jordan with partial pivoting.
  std::array<std::array<double, 8>, 4> a{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
    a[i][4 + i] = 1.0;
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) {
      fail(ErrorKind::degenerate_metric, "singular metric in oracle");
    }
    std::swap(a[piv], a[col]);
    const double inv = 1.0 / a[col][col];
    for (double& v : a[col]) v *= inv;
    for (int r = 0; r < 4; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double s = a[r][col];
      for (int j = 0; j < 8; ++j) a[r][j] -= s * a[col][j];
    }
  }
  Matrix4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[i][j] = a[i][4 + j];
  }
  return out;
}

Matrix4 sample_lower(const MetricSampler& s, double w, double z) {
  const MetricJet jet = s(w, z);
  // Only values are meaningful; clear derivatives so nothing leaks in.
  MetricJet v{Jet::constant(jet.F.val), Jet::constant(jet.A.val),
              Jet::constant(jet.K.val), Jet::constant(jet.Pi.val)};
  return metric_components(v).lower;
}

}  // namespace

Matrix4 ricci_brute_force_full(const MetricSampler& sampler, double w, double z,
                               double h) {
  if (!(h > 0.0)) fail(ErrorKind::numeric, "oracle step must be positive");
  // Representable steps so that the stencil is exactly symmetric.
  volatile double wp = w + h, zp = z + h;
  const double hw = wp - w, hz = zp - z;

  const Matrix4 g = sample_lower(sampler, w, z);
  const Matrix4 gwp = sample_lower(sampler, w + hw, z);
  const Matrix4 gwm = sample_lower(sampler, w - hw, z);
  const Matrix4 gzp = sample_lower(sampler, w, z + hz);
  const Matrix4 gzm = sample_lower(sampler, w, z - hz);
  const Matrix4 gpp = sample_lower(sampler, w + hw, z + hz);
  const Matrix4 gpm = sample_lower(sampler, w + hw, z - hz);
  const Matrix4 gmp = sample_lower(sampler, w - hw, z + hz);
  const Matrix4 gmm = sample_lower(sampler, w - hw, z - hz);

  // dg[e][a][b] = d_e g_ab, ddg[e][f][a][b] = d_e d_f g_ab.
  double dg[4][4][4] = {};
  double ddg[4][4][4][4] = {};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      dg[1][a][b] = (gwp[a][b] - gwm[a][b]) / (2.0 * hw);
      dg[3][a][b] = (gzp[a][b] - gzm[a][b]) / (2.0 * hz);
      ddg[1][1][a][b] = (gwp[a][b] - 2.0 * g[a][b] + gwm[a][b]) / (hw * hw);
      ddg[3][3][a][b] = (gzp[a][b] - 2.0 * g[a][b] + gzm[a][b]) / (hz * hz);
      const double mixed =
          (gpp[a][b] - gpm[a][b] - gmp[a][b] + gmm[a][b]) / (4.0 * hw * hz);
      ddg[1][3][a][b] = ddg[3][1][a][b] = mixed;
    }
  }
  const Matrix4 gi = invert4(g);

  // d_e g^{ab} = -g^{ap} d_e g_pq g^{qb}
  double dgi[4][4][4] = {};
  for (int e : {1, 3}) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        double s = 0.0;
        for (int p = 0; p < 4; ++p) {
          for (int q = 0; q < 4; ++q) s -= gi[a][p] * dg[e][p][q] * gi[q][b];
        }
        dgi[e][a][b] = s;
      }
    }
  }

  // Christoffel symbols of the first kind and their derivatives.
  double low[4][4][4] = {};       // [d][b][c]
  double dlow[4][4][4][4] = {};   // [e][d][b][c]
  for (int d = 0; d < 4; ++d) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        low[d][b][c] = 0.5 * (dg[c][d][b] + dg[b][d][c] - dg[d][b][c]);
        for (int e : {1, 3}) {
          dlow[e][d][b][c] =
              0.5 * (ddg[e][c][d][b] + ddg[e][b][d][c] - ddg[e][d][b][c]);
        }
      }
    }
  }
  double Gam[4][4][4] = {};
  double dGam[4][4][4][4] = {};  // [e][a][b][c]
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int d = 0; d < 4; ++d) s += gi[a][d] * low[d][b][c];
        Gam[a][b][c] = s;
        for (int e : {1, 3}) {
          double t = 0.0;
          for (int d = 0; d < 4; ++d) {
            t += dgi[e][a][d] * low[d][b][c] + gi[a][d] * dlow[e][d][b][c];
          }
          dGam[e][a][b][c] = t;
        }
      }
    }
  }

  Matrix4 R{};
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) {
        s += dGam[a][a][mu][nu] - dGam[nu][a][mu][a];
        for (int b = 0; b < 4; ++b) {
          s += Gam[a][mu][nu] * Gam[b][a][b] - Gam[b][mu][a] * Gam[a][nu][b];
        }
      }
      R[mu][nu] = s;
    }
  }
  return R;
}

RicciComponents ricci_brute_force(const MetricSampler& sampler, double w,
                                  double z, double h) {
  const Matrix4 R = ricci_brute_force_full(sampler, w, z, h);
  return RicciComponents{R[0][0], R[0][2], R[2][2], R[1][1], R[3][3], R[1][3]};
}

RicciComponents ricci_richardson(const MetricSampler& sampler, double w,
                                 double z, double h) {
  const RicciComponents a = ricci_brute_force(sampler, w, z, h);
  const RicciComponents b = ricci_brute_force(sampler, w, z, 0.5 * h);
  auto x = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
  return RicciComponents{x(a.R00, b.R00), x(a.R02, b.R02), x(a.R22, b.R22),
                         x(a.R11, b.R11), x(a.R33, b.R33), x(a.R13, b.R13)};
}

double max_abs_diff(const RicciComponents& a, const RicciComponents& b) {
  double m = 0.0;
  m = std::max(m, std::abs(a.R00 - b.R00));
  m = std::max(m, std::abs(a.R02 - b.R02));
  m = std::max(m, std::abs(a.R22 - b.R22));
  m = std::max(m, std::abs(a.R11 - b.R11));
  m = std::max(m, std::abs(a.R33 - b.R33));
  m = std::max(m, std::abs(a.R13 - b.R13));
  return m;
}

}  // namespace astar
