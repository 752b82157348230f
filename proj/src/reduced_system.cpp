#include "astar/reduced_system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "astar/errors.hpp"

namespace astar {

double scaled_error(double a, double b, std::initializer_list<double> terms) {
  double s = 1.0;
  for (double t : terms) s += std::abs(t);
  return std::abs(a - b) / s;
}

double ReducedResiduals::max_scaled() const {
  return std::max({std::abs(rF) / sF, std::abs(rA) / sA, std::abs(rPi) / sPi,
                   std::abs(rKd) / sKd, std::abs(rKe) / sKe});
}

double EinsteinResiduals::max_scaled() const {
  const auto v = values();
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(v[i]) / scale[i]);
  return m;
}

std::array<double, 2> k_gradient_targets(const KRightSides& rh, double Pi_w,
                                         double Pi_z) {
  const double n2 = Pi_w * Pi_w + Pi_z * Pi_z;
  if (!(n2 > 0.0)) {
    fail(ErrorKind::gauge_degeneracy, "grad Pi vanishes");
  }
  return {(Pi_w * rh.d + Pi_z * rh.e) / n2, (-Pi_z * rh.d + Pi_w * rh.e) / n2};
}

KRightSides k_right_sides_from_targets(double kt1, double kt3, double Pi_w,
                                       double Pi_z) {
  return {Pi_w * kt1 - Pi_z * kt3, Pi_z * kt1 + Pi_w * kt3};
}

KRightSides k_right_sides(const MetricJet& jet) {
  const Jet& F = jet.F;
  const Jet& A = jet.A;
  const Jet& Pi = jet.Pi;
  const double p = Pi.val;
  const double e4F = std::exp(4.0 * F.val);
  KRightSides rh;
  rh.d = 0.5 * (Pi.ww - Pi.zz) + p * (F.w * F.w - F.z * F.z) -
         e4F * (A.w * A.w - A.z * A.z) / (4.0 * p);
  rh.e = Pi.wz + 2.0 * p * F.w * F.z - e4F * A.w * A.z / (2.0 * p);
  return rh;
}

ReducedResiduals reduced_residuals(const MetricJet& jet,
                                   const FluidPoint& fluid,
                                   const Constants& k) {
  validate(jet);
  const Jet& F = jet.F;
  const Jet& A = jet.A;
  const Jet& K = jet.K;
  const Jet& Pi = jet.Pi;
  const double p = Pi.val;
  const double n2 = Pi.grad_sq();
  if (!(n2 > 0.0)) {
    std::ostringstream os;
    os << "grad Pi vanishes (Pi = " << p << ")";
    fail(ErrorKind::gauge_degeneracy, os.str());
  }
  const double e2F = std::exp(2.0 * F.val);
  const double e4F = e2F * e2F;
  const double em = std::exp(2.0 * (K.val - F.val));
  const double kap = 0.5 * k.coupling();  // 4 pi G / c^4
  const double eP = fluid.eps + fluid.P;

  double srcF = 0.0, srcA = 0.0;
  if (eP != 0.0) {
    const double om = fluid.Omega / k.c;
    const double b = 1.0 + om * A.val;
    const double rot = om * om * p * p / e2F;
    const double e2G = e2F * b * b - rot;
    if (!(e2G > 0.0)) {
      std::ostringstream os;
      os << "4-velocity is not timelike: e^{2G} = " << e2G;
      fail(ErrorKind::causal_limit, os.str());
    }
    srcF = kap * em * (eP * (e2F * b * b + rot) / e2G + 2.0 * fluid.P);
    srcA = -4.0 * kap * em * eP * (om * p * p * b / e2F) / e2G;
  }
  const double srcPi = 4.0 * kap * em * fluid.P * p;

  ReducedResiduals r;
  const double tF1 = F.laplacian();
  const double tF2 = grad_dot(F, Pi) / p;
  const double tF3 = e4F * A.grad_sq() / (2.0 * p * p);
  r.rF = tF1 + tF2 + tF3 - srcF;
  r.sF = 1.0 + std::abs(F.ww) + std::abs(F.zz) + std::abs(tF2) +
         std::abs(tF3) + std::abs(srcF);

  const double tA1 = A.laplacian();
  const double tA2 = -grad_dot(Pi, A) / p;
  const double tA3 = 4.0 * grad_dot(F, A);
  r.rA = tA1 + tA2 + tA3 - srcA;
  r.sA = 1.0 + std::abs(A.ww) + std::abs(A.zz) + std::abs(tA2) +
         std::abs(tA3) + std::abs(srcA);

  r.rPi = Pi.laplacian() - srcPi;
  r.sPi = 1.0 + std::abs(Pi.ww) + std::abs(Pi.zz) + std::abs(srcPi);

  const KRightSides rh = k_right_sides(jet);
  r.rKd = Pi.w * K.w - Pi.z * K.z - rh.d;
  r.rKe = Pi.z * K.w + Pi.w * K.z - rh.e;
  r.sKd = 1.0 + std::abs(Pi.w * K.w) + std::abs(Pi.z * K.z) +
          0.5 * (std::abs(Pi.ww) + std::abs(Pi.zz)) +
          p * (F.w * F.w + F.z * F.z) + e4F * A.grad_sq() / (4.0 * p);
  r.sKe = 1.0 + std::abs(Pi.z * K.w) + std::abs(Pi.w * K.z) +
          std::abs(Pi.wz) + 2.0 * p * std::abs(F.w * F.z) +
          e4F * std::abs(A.w * A.z) / (2.0 * p);
  const auto kt = k_gradient_targets(rh, Pi.w, Pi.z);
  r.kt1 = kt[0];
  r.kt3 = kt[1];
  return r;
}

EinsteinResiduals einstein_residuals(const MetricJet& jet,
                                     const FluidPoint& fluid,
                                     const Constants& k) {
  const RicciComponents R = ricci_closed_form(lanczos_to_lewis(jet));
  const StressEnergy T = stress_energy(jet, fluid, k);
  const double c = k.coupling();
  const auto& S = T.S_lower;
  EinsteinResiduals q;
  q.Q00 = R.R00 - c * S[0][0];
  q.Q02 = R.R02 - c * S[0][2];
  q.Q22 = R.R22 - c * S[2][2];
  q.Q11 = R.R11 - c * S[1][1];
  q.Q33 = R.R33 - c * S[3][3];
  q.Q13 = R.R13 - c * S[1][3];
  q.scale = {1.0 + std::abs(R.R00) + c * std::abs(S[0][0]),
             1.0 + std::abs(R.R02) + c * std::abs(S[0][2]),
             1.0 + std::abs(R.R22) + c * std::abs(S[2][2]),
             1.0 + std::abs(R.R11) + c * std::abs(S[1][1]),
             1.0 + std::abs(R.R33) + c * std::abs(S[3][3]),
             1.0 + std::abs(R.R13) + c * std::abs(S[1][3])};
  return q;
}

double determinant(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::array<double, 3> solve3(const Matrix3& m, const std::array<double, 3>& b) {
  const double det = determinant(m);
  if (det == 0.0) fail(ErrorKind::numeric, "singular 3x3 system");
  std::array<double, 3> x{};
  for (int col = 0; col < 3; ++col) {
    Matrix3 t = m;
    for (int r = 0; r < 3; ++r) t[r][col] = b[r];
    x[col] = determinant(t) / det;
  }
  return x;
}

EquivalenceMap unprimed_equivalence_map(const MetricJet& jet) {
  const LewisState ls = lanczos_to_lewis(jet);
  const double f = ls.f.val, kk = ls.k.val, l = ls.l.val;
  const double em = std::exp(ls.m.val);
  EquivalenceMap M;
  M.rows = {{{1.0, 0.0, 0.0}, {-jet.A.val, 1.0, 0.0}, {l, -2.0 * kk, -f}}};
  M.row_scale = {em / f, 2.0 * em / f, em / jet.Pi.val};
  return M;
}

EquivalenceReport equivalence_check(const MetricJet& jet,
                                    const FluidPoint& fluid,
                                    const Constants& k) {
  const EquivalenceMap M = unprimed_equivalence_map(jet);
  const EinsteinResiduals Q = einstein_residuals(jet, fluid, k);
  const ReducedResiduals r = reduced_residuals(jet, fluid, k);
  const std::array<double, 3> q = {Q.Q00, Q.Q02, Q.Q22};
  const std::array<double, 3> qs = {Q.scale[0], Q.scale[1], Q.scale[2]};
  const std::array<double, 3> rv = {r.rF, r.rA, r.rPi};
  const std::array<double, 3> rs = {r.sF, r.sA, r.sPi};

  EquivalenceReport rep;
  rep.determinant = determinant(M.rows);
  rep.expected_determinant = -std::exp(2.0 * jet.F.val);
  rep.determinant_error = std::abs(rep.determinant - rep.expected_determinant) /
                          std::abs(rep.expected_determinant);
  for (int i = 0; i < 3; ++i) {
    double mq = 0.0, mag = 0.0;
    for (int j = 0; j < 3; ++j) {
      mq += M.rows[i][j] * q[j];
      mag += std::abs(M.rows[i][j]) * qs[j];
    }
    const double err = std::abs(M.row_scale[i] * mq - rv[i]) /
                       (rs[i] + M.row_scale[i] * mag);
    rep.forward_error = std::max(rep.forward_error, err);
  }
  std::array<double, 3> b{};
  for (int i = 0; i < 3; ++i) b[i] = rv[i] / M.row_scale[i];
  const auto qrec = solve3(M.rows, b);
  double rmag = 0.0;
  for (int i = 0; i < 3; ++i) rmag += rs[i] / M.row_scale[i];
  for (int i = 0; i < 3; ++i) {
    const double err = std::abs(qrec[i] - q[i]) / (qs[i] + rmag);
    rep.inverse_error = std::max(rep.inverse_error, err);
  }
  return rep;
}

IdentityReport identity_suite(const MetricJet& jet, const FluidPoint& fluid,
                              const Constants& k) {
  const LewisState ls = lanczos_to_lewis(jet);
  const RicciComponents R = ricci_closed_form(ls);
  const StressEnergy T = stress_energy(jet, fluid, k);
  const double f = ls.f.val, kk = ls.k.val, l = ls.l.val;
  const double Pi = jet.Pi.val;
  const auto& S = T.S_lower;

  IdentityReport rep;
  const double a0 = l * S[0][0], a1 = -2.0 * kk * S[0][2], a2 = -f * S[2][2];
  const double rhs6 = 2.0 * fluid.P * Pi * Pi;
  rep.stress_identity = scaled_error(a0 + a1 + a2, rhs6, {a0, a1, a2, rhs6});

  const double em = std::exp(ls.m.val);
  const double b0 = em / Pi * l * R.R00, b1 = -em / Pi * 2.0 * kk * R.R02,
               b2 = -em / Pi * f * R.R22;
  const double lap = jet.Pi.laplacian();
  rep.ricci_identity =
      scaled_error(b0 + b1 + b2, lap, {b0, b1, b2, jet.Pi.ww, jet.Pi.zz});

  rep.pi_equation = lap - 2.0 * k.coupling() * em * fluid.P * Pi;
  return rep;
}

ConsistencyDefect consistency_defect(const JetSampler& jets,
                                     const FluidSampler& fluid,
                                     const Constants& k, double w, double z,
                                     double h) {
  if (!(h > 0.0)) fail(ErrorKind::numeric, "step must be positive");
  ConsistencyDefect out;
  const MetricJet c = jets(w, z);
  const FluidPoint fc = fluid(w, z);
  if (fc.rho > 0.0 && (fc.dOmega_w != 0.0 || fc.dOmega_z != 0.0)) {
    out.hypothesis_holds = false;
    out.warning =
        "angular velocity varies inside matter; the defect identity is not "
        "claimed here";
  }
  auto targets = [&](const MetricJet& jet) {
    validate(jet);
    return k_gradient_targets(k_right_sides(jet), jet.Pi.w, jet.Pi.z);
  };
  const auto zp = targets(jets(w, z + h)), zm = targets(jets(w, z - h));
  const auto wp = targets(jets(w + h, z)), wm = targets(jets(w - h, z));
  out.lhs = (zp[0] - zm[0]) / (2.0 * h) - (wp[1] - wm[1]) / (2.0 * h);

  const auto kt = targets(c);
  const double em = std::exp(2.0 * (c.K.val - c.F.val));
  const double n2 = c.Pi.grad_sq();
  out.rhs = 2.0 * k.coupling() * em * fc.P * c.Pi.val / n2 *
            ((c.K.w - kt[0]) * c.Pi.z - (c.K.z - kt[1]) * c.Pi.w);
  return out;
}

}  // namespace astar
