#include "astar/corotating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "astar/errors.hpp"

namespace astar {

namespace {

Jet omega_jet(const Jet& Omega, const Constants& k) { return Omega / k.c; }

double B(const Jet& a, const Jet& b, double Pi) { return grad_dot(a, b) / Pi; }

// Residuals of the primed equations; corrections are added after the core
// terms so a null correction leaves the constant-Omega result bit for bit.
ReducedResiduals primed_impl(const PrimedState& s, const FluidPoint& fluid,
                             const Constants& k, const CorrectionTerms* corr) {
  const MetricJet pot = s.potentials();
  validate(pot);
  const Jet& F = s.Fp;
  const Jet& A = s.Ap;
  const Jet& K = s.Kp;
  const Jet& Pi = s.Pi;
  const double p = Pi.val;
  if (!(Pi.grad_sq() > 0.0)) {
    fail(ErrorKind::gauge_degeneracy, "grad Pi vanishes");
  }
  const double e2F = std::exp(2.0 * F.val);
  const double e4F = e2F * e2F;
  const double em = std::exp(s.mp.val);
  const double kap = 0.5 * k.coupling();

  const double srcF = kap * em * (fluid.eps + 3.0 * fluid.P);
  const double srcPi = 4.0 * kap * em * fluid.P * p;

  ReducedResiduals r;
  const double tF2 = grad_dot(F, Pi) / p;
  const double tF3 = e4F * A.grad_sq() / (2.0 * p * p);
  double lhsF = F.laplacian() + tF2 + tF3;
  double extraF = 0.0;
  if (corr) {
    const double c1 = 0.5 * p / e2F * corr->D1;
    const double c2 = corr->W1 / (2.0 * p * p);
    lhsF = lhsF + c1 + c2;
    extraF = std::abs(c1) + std::abs(c2);
  }
  r.rF = lhsF - srcF;
  r.sF = 1.0 + std::abs(F.ww) + std::abs(F.zz) + std::abs(tF2) +
         std::abs(tF3) + std::abs(srcF) + extraF;

  const double tA2 = -grad_dot(Pi, A) / p;
  const double tA3 = 4.0 * grad_dot(F, A);
  double lhsA = A.laplacian() + tA2 + tA3;
  double extraA = 0.0;
  if (corr) {
    const double c1 = p / e4F * corr->D2;
    lhsA = lhsA + c1;
    extraA = std::abs(c1);
  }
  r.rA = lhsA;
  r.sA = 1.0 + std::abs(A.ww) + std::abs(A.zz) + std::abs(tA2) +
         std::abs(tA3) + extraA;

  r.rPi = Pi.laplacian() - srcPi;
  r.sPi = 1.0 + std::abs(Pi.ww) + std::abs(Pi.zz) + std::abs(srcPi);

  KRightSides rh = k_right_sides(pot);
  double extraK = 0.0;
  if (corr) {
    const double cd = (corr->W1_1 - corr->W1_3) / (4.0 * p);
    const double ce = corr->W2 / (2.0 * p);
    rh.d = rh.d - cd;
    rh.e = rh.e - ce;
    extraK = std::abs(cd) + std::abs(ce);
  }
  r.rKd = Pi.w * K.w - Pi.z * K.z - rh.d;
  r.rKe = Pi.z * K.w + Pi.w * K.z - rh.e;
  r.sKd = 1.0 + std::abs(Pi.w * K.w) + std::abs(Pi.z * K.z) +
          0.5 * (std::abs(Pi.ww) + std::abs(Pi.zz)) +
          p * (F.w * F.w + F.z * F.z) + e4F * A.grad_sq() / (4.0 * p) + extraK;
  r.sKe = 1.0 + std::abs(Pi.z * K.w) + std::abs(Pi.w * K.z) +
          std::abs(Pi.wz) + 2.0 * p * std::abs(F.w * F.z) +
          e4F * std::abs(A.w * A.z) / (2.0 * p) + extraK;
  const auto kt = k_gradient_targets(rh, Pi.w, Pi.z);
  r.kt1 = kt[0];
  r.kt3 = kt[1];
  return r;
}

}  // namespace

PrimedState to_primed(const MetricJet& jet, const Jet& Omega,
                      const Constants& k) {
  const LewisState ls = lanczos_to_lewis(jet);
  const Jet om = omega_jet(Omega, k);
  PrimedState s;
  s.fp = ls.f - 2.0 * om * ls.k - square(om) * ls.l;
  if (!(s.fp.val > 0.0)) {
    std::ostringstream os;
    os << "f' = " << s.fp.val << " is not positive (light cylinder reached)";
    fail(ErrorKind::causal_limit, os.str());
  }
  s.kp = ls.k + om * ls.l;
  s.lp = ls.l;
  s.mp = ls.m;
  s.Fp = 0.5 * log(s.fp);
  s.Ap = -(s.kp / s.fp);
  s.Kp = 0.5 * s.mp + s.Fp;
  s.Pi = jet.Pi;
  return s;
}

MetricJet from_primed(const PrimedState& primed, const Jet& Omega,
                      const Constants& k) {
  const Jet om = omega_jet(Omega, k);
  const Jet kk = primed.kp - om * primed.lp;
  const Jet f = primed.fp + 2.0 * om * primed.kp - square(om) * primed.lp;
  if (!(f.val > 0.0)) {
    fail(ErrorKind::degenerate_metric, "recovered f is not positive");
  }
  MetricJet jet;
  jet.F = 0.5 * log(f);
  jet.A = -(kk / f);
  jet.K = 0.5 * primed.mp + jet.F;
  jet.Pi = primed.Pi;
  return jet;
}

PrimedState primed_from_potentials(const MetricJet& potentials) {
  const LewisState ls = lanczos_to_lewis(potentials);
  PrimedState s;
  s.Fp = potentials.F;
  s.Ap = potentials.A;
  s.Kp = potentials.K;
  s.Pi = potentials.Pi;
  s.fp = ls.f;
  s.kp = ls.k;
  s.lp = ls.l;
  s.mp = ls.m;
  return s;
}

CorrectionTerms correction_terms(const PrimedState& s, const Jet& Omega,
                                 const Constants& k) {
  const Jet om = omega_jet(Omega, k);
  const double p = s.Pi.val;
  const double kp = s.kp.val, lp = s.lp.val, fp = s.fp.val;
  CorrectionTerms t;
  double W1j[2];
  for (int n = 0; n < 2; ++n) {
    const int j = n == 0 ? 1 : 3;
    const double oj = om.d(j), ojj = om.dd(j, j);
    const double d_oj_over_pi = 2.0 * ojj / p - 2.0 * oj * s.Pi.d(j) / (p * p);
    t.D1 += 4.0 / p * oj * s.kp.d(j) + d_oj_over_pi * kp -
            2.0 / p * oj * oj * lp;
    W1j[n] = 2.0 * oj * (kp * s.lp.d(j) - lp * s.kp.d(j)) + oj * oj * lp * lp;
  }
  t.W1_1 = W1j[0];
  t.W1_3 = W1j[1];
  t.W1 = W1j[0] + W1j[1];
  t.W2 = om.w * (kp * s.lp.z - lp * s.kp.z) +
         om.z * (kp * s.lp.w - lp * s.kp.w) + om.w * om.z * lp * lp;
  const double LOm = om.laplacian() / p - grad_dot(om, s.Pi) / (p * p);
  t.D2 = (p * p + kp * kp) * LOm + 4.0 * kp * B(om, s.kp, p) -
         2.0 * kp * lp * B(om, om, p) + 2.0 * fp * B(om, s.lp, p);
  t.sigma_p = sigma(LewisState{s.fp, s.kp, s.lp, s.mp});
  return t;
}

ReducedResiduals primed_reduced_residuals(const PrimedState& primed,
                                          const FluidPoint& fluid,
                                          const Jet& Omega,
                                          const Constants& k) {
  const CorrectionTerms corr = correction_terms(primed, Omega, k);
  return primed_impl(primed, fluid, k, &corr);
}

ReducedResiduals ceq_residuals(const PrimedState& primed,
                               const FluidPoint& fluid, const Constants& k) {
  return primed_impl(primed, fluid, k, nullptr);
}

EquivalenceMap primed_equivalence_map(const MetricJet& jet, double Omega,
                                      const Constants& k) {
  const LewisState ls = lanczos_to_lewis(jet);
  const double f = ls.f.val, kk = ls.k.val, l = ls.l.val;
  const double em = std::exp(ls.m.val);
  const double om = Omega / k.c;
  const double fp = f - 2.0 * om * kk - om * om * l;
  EquivalenceMap M;
  M.rows = {{{l, -2.0 * kk, -f},
             {kk + om * l, f + om * om * l, om * (f - om * kk)},
             {1.0, 2.0 * om, om * om}}};
  M.row_scale = {em / jet.Pi.val, 2.0 * em / (fp * fp), em / fp};
  return M;
}

EquivalenceReport primed_equivalence_check(const MetricJet& jet,
                                           const FluidPoint& fluid,
                                           const Jet& Omega,
                                           const Constants& k) {
  const EquivalenceMap M = primed_equivalence_map(jet, Omega.val, k);
  const EinsteinResiduals Q = einstein_residuals(jet, fluid, k);
  const PrimedState s = to_primed(jet, Omega, k);
  const ReducedResiduals r = primed_reduced_residuals(s, fluid, Omega, k);
  const std::array<double, 3> q = {Q.Q00, Q.Q02, Q.Q22};
  const std::array<double, 3> qs = {Q.scale[0], Q.scale[1], Q.scale[2]};
  const std::array<double, 3> rv = {r.rPi, r.rA, r.rF};
  const std::array<double, 3> rs = {r.sPi, r.sA, r.sF};

  EquivalenceReport rep;
  rep.determinant = determinant(M.rows);
  rep.expected_determinant = s.fp.val * s.fp.val;
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

ConsistencyDefect primed_consistency_defect(const JetSampler& primed_potentials,
                                            const FluidSampler& fluid,
                                            const Constants& k, double w,
                                            double z, double h) {
  ConsistencyDefect out = consistency_defect(primed_potentials, fluid, k, w, z, h);
  const FluidPoint fc = fluid(w, z);
  if (fc.dOmega_w != 0.0 || fc.dOmega_z != 0.0) {
    out.hypothesis_holds = false;
    out.warning =
        "angular velocity is not constant; the primed defect identity assumes "
        "rigid rotation";
  }
  return out;
}

double TransformReport::max_error() const {
  return std::max({square_identity, inverse_identity, mixed_identity,
                   lewis_route, g_minus_fp, velocity_error});
}

TransformReport verify_transform(const MetricJet& jet, double Omega,
                                 const Constants& k) {
  validate(jet);
  const double om = Omega / k.c;
  const double F = jet.F.val, A = jet.A.val, K = jet.K.val, Pi = jet.Pi.val;
  const double e2F = std::exp(2.0 * F);
  const double b = 1.0 + A * om;
  const double e2Fp = e2F * b * b - Pi * Pi * om * om / e2F;
  if (!(e2Fp > 0.0)) {
    std::ostringstream os;
    os << "e^{2F'} = " << e2Fp << " is not positive";
    fail(ErrorKind::corotation_breakdown, os.str());
  }
  TransformReport rep;
  rep.Fp = 0.5 * std::log(e2Fp);
  rep.Ap = (e2F * b * A - om * Pi * Pi / e2F) / e2Fp;
  rep.Kp = K - F + rep.Fp;

  const double sq_p = e2Fp * rep.Ap * rep.Ap - Pi * Pi / e2Fp;
  const double sq = e2F * A * A - Pi * Pi / e2F;
  rep.square_identity = scaled_error(sq_p, sq, {e2Fp * rep.Ap * rep.Ap,
                                                Pi * Pi / e2Fp, e2F * A * A,
                                                Pi * Pi / e2F});
  const double bp = 1.0 - rep.Ap * om;
  const double e2F_back = e2Fp * bp * bp - Pi * Pi * om * om / e2Fp;
  rep.inverse_identity =
      scaled_error(e2F_back, e2F, {e2Fp * bp * bp, Pi * Pi * om * om / e2Fp});
  rep.mixed_identity = scaled_error(bp * e2Fp, b * e2F, {bp * e2Fp, b * e2F});

  const PrimedState s = to_primed(jet, Jet::constant(Omega), k);
  rep.lewis_route = std::max({scaled_error(rep.Fp, s.Fp.val, {rep.Fp}),
                              scaled_error(rep.Ap, s.Ap.val, {rep.Ap}),
                              scaled_error(rep.Kp, s.Kp.val, {rep.Kp})});

  const FourVelocity U = four_velocity(jet, Omega, k);
  rep.g_minus_fp = std::abs(U.G - rep.Fp);
  // t' = t and phi' = phi - Omega t.
  rep.U_corotating = {U.upper[0], U.upper[1], U.upper[2] - om * U.upper[0],
                      U.upper[3]};
  const double u0 = rep.U_corotating[0];
  rep.velocity_error = std::abs(u0 - std::exp(-U.G)) +
                       std::abs(rep.U_corotating[2]) +
                       std::abs(e2Fp * u0 * u0 - 1.0);
  return rep;
}

TransformReport verify_transform(const MetricJet& jet, const Jet& Omega,
                                 const Constants& k) {
  if (Omega.w != 0.0 || Omega.z != 0.0 || Omega.ww != 0.0 || Omega.wz != 0.0 ||
      Omega.zz != 0.0) {
    fail(ErrorKind::hypothesis_violation,
         "the corotating coordinate change needs a constant angular velocity");
  }
  return verify_transform(jet, Omega.val, k);
}

LineElementDefect corotating_line_element(const MetricJet& jet,
                                          const Jet& Omega, double t,
                                          const std::array<double, 4>& dx,
                                          const Constants& k) {
  const double om = Omega.val / k.c;
  const double delta = t * (Omega.w * dx[1] + Omega.z * dx[3]);
  const std::array<double, 4> dX = {dx[0], dx[1], dx[2] + om * dx[0] + delta,
                                    dx[3]};
  const Matrix4 g = metric_components(jet).lower;
  const PrimedState s = to_primed(jet, Jet::constant(Omega.val), k);
  const Matrix4 gp = metric_components(s.potentials()).lower;
  double ds2 = 0.0, ds2p = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      ds2 += g[a][b] * dX[a] * dX[b];
      ds2p += gp[a][b] * dx[a] * dx[b];
    }
  }
  LineElementDefect out;
  out.difference = ds2 - ds2p;
  const double g22 = g[2][2], g02 = g[0][2];
  out.exact_extra =
      g22 * delta * delta + 2.0 * delta * (g02 * dx[0] + g22 * (dx[2] + om * dx[0]));
  const double dt = dx[0] / k.c;
  double diag = 0.0;
  const double dO[2] = {Omega.w, Omega.z};
  const double dxj[2] = {dx[1], dx[3]};
  for (int j = 0; j < 2; ++j) {
    const double q = dO[j] * dxj[j];
    diag += t * t * q * q + 2.0 * t * Omega.val * q * dt + 2.0 * t * q * dx[2];
  }
  out.diagonal_extra = gp[2][2] * diag;
  return out;
}

}  // namespace astar
