#include <cmath>
#include <random>

#include "astar/corotating.hpp"
#include "astar/errors.hpp"
#include "astar/sampling.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace astar;

namespace {

MetricJet flat(double w) {
  return MetricJet{Jet::constant(0.0), Jet::constant(0.0), Jet::constant(0.0),
                   Jet::coord_w(w)};
}

double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

double jet_diff(const Jet& a, const Jet& b) {
  return std::max({rel(a.val, b.val), rel(a.w, b.w), rel(a.z, b.z),
                   rel(a.ww, b.ww), rel(a.wz, b.wz), rel(a.zz, b.zz)});
}

bool same(const ReducedResiduals& a, const ReducedResiduals& b) {
  return a.rF == b.rF && a.rA == b.rA && a.rPi == b.rPi && a.rKd == b.rKd &&
         a.rKe == b.rKe && a.kt1 == b.kt1 && a.kt3 == b.kt3;
}

}  // namespace

TEST_CASE("primed variables without rotation are the unprimed ones") {
  std::mt19937_64 rng(71);
  for (int n = 0; n < 100; ++n) {
    const MetricJet j = random_admissible_state(rng, Constants{}, false).jet;
    const PrimedState s = to_primed(j, Jet::constant(0.0), Constants{});
    CHECK(jet_diff(s.Fp, j.F) <= 1e-14);
    CHECK(jet_diff(s.Ap, j.A) <= 1e-14);
    CHECK(jet_diff(s.Kp, j.K) <= 1e-14);
  }
}

TEST_CASE("primed variables of rotating flat space") {
  const PrimedState s = to_primed(flat(1.0), Jet::constant(0.5), Constants{});
  CHECK(s.fp.val == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(s.kp.val == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.lp.val == doctest::Approx(1.0).epsilon(1e-15));
  try {
    to_primed(flat(2.0), Jet::constant(0.5), Constants{});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::causal_limit);
  }
}

TEST_CASE("primed state invariants and round trip") {
  const Constants k;
  std::mt19937_64 rng(73);
  for (int n = 0; n < 300; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, true);
    const PrimedState s = to_primed(a.jet, a.Omega, k);
    const double Pi2 = a.jet.Pi.val * a.jet.Pi.val;
    CHECK(std::abs(s.fp.val * s.lp.val + s.kp.val * s.kp.val - Pi2) <=
          1e-12 * Pi2);
    const double e2Fp = std::exp(2.0 * s.Fp.val);
    const double lp = -e2Fp * s.Ap.val * s.Ap.val + Pi2 / e2Fp;
    CHECK(std::abs(lp - s.lp.val) <= 1e-12 * (1.0 + std::abs(lp)));
    CHECK(s.mp.val == lanczos_to_lewis(a.jet).m.val);

    const MetricJet back = from_primed(s, a.Omega, k);
    CHECK(jet_diff(back.F, a.jet.F) <= 1e-12);
    CHECK(jet_diff(back.A, a.jet.A) <= 1e-12);
    CHECK(jet_diff(back.K, a.jet.K) <= 1e-12);

    // f' d_j k' - k' d_j f' = -e^{4F'} d_j A'
    for (int j : {1, 3}) {
      const double lhs = s.fp.val * s.kp.d(j) - s.kp.val * s.fp.d(j);
      const double rhs = -e2Fp * e2Fp * s.Ap.d(j);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("correction terms") {
  const Constants k;
  std::mt19937_64 rng(79);
  for (int n = 0; n < 100; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, false);
    const PrimedState s = to_primed(a.jet, a.Omega, k);
    const CorrectionTerms t = correction_terms(s, a.Omega, k);
    CHECK(t.D1 == 0.0);
    CHECK(t.D2 == 0.0);
    CHECK(t.W1 == 0.0);
    CHECK(t.W2 == 0.0);
  }
  for (int n = 0; n < 300; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, true);
    const PrimedState s = to_primed(a.jet, a.Omega, k);
    const CorrectionTerms t = correction_terms(s, a.Omega, k);
    const LewisState u = lanczos_to_lewis(a.jet);
    const double S = sigma(u);
    CHECK(std::abs(S - (t.sigma_p + t.W1)) <= 1e-12 * (1.0 + std::abs(S)));
    CHECK(std::abs(t.sigma_p - sigma_from_lanczos(s.potentials())) <=
          1e-12 * (1.0 + std::abs(t.sigma_p)));
    // Mixed analogue: f_1 l_3 + l_1 f_3 + 2 k_1 k_3 in both variable sets.
    const double mix = u.f.w * u.l.z + u.l.w * u.f.z + 2.0 * u.k.w * u.k.z;
    const double mixp = s.fp.w * s.lp.z + s.lp.w * s.fp.z + 2.0 * s.kp.w * s.kp.z;
    CHECK(std::abs(mix - (mixp + 2.0 * t.W2)) <= 1e-12 * (1.0 + std::abs(mix)));
    // Per-direction split of the same identity.
    const double s1 = u.f.w * u.l.w + u.k.w * u.k.w;
    const double s1p = s.fp.w * s.lp.w + s.kp.w * s.kp.w;
    CHECK(std::abs(s1 - (s1p + t.W1_1)) <= 1e-12 * (1.0 + std::abs(s1)));
  }
}

TEST_CASE("W2 for an angular velocity that depends on w only") {
  const Constants k;
  MetricJet j = flat(1.2);
  j.F = Jet{0.1, 0.2, 0.3, 0.0, 0.0, 0.0};
  j.A = Jet{0.05, 0.1, -0.2, 0.0, 0.0, 0.0};
  const Jet Omega{0.2, 0.1, 0.0, 0.0, 0.0, 0.0};
  const PrimedState s = to_primed(j, Omega, k);
  const CorrectionTerms t = correction_terms(s, Omega, k);
  const double expect = 0.1 * (s.kp.val * s.lp.z - s.lp.val * s.kp.z);
  CHECK(t.W2 == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("primed residuals: flat space, source factor, constant Omega path") {
  const Constants k;
  for (double Om : {0.0, 0.3}) {
    const PrimedState s = to_primed(flat(1.5), Jet::constant(Om), k);
    const ReducedResiduals r =
        primed_reduced_residuals(s, FluidPoint{}, Jet::constant(Om), k);
    CHECK(r.max_scaled() <= 1e-15);
  }

  FluidPoint fl;
  fl.rho = 1.0;
  fl.eps = 1.0;
  fl.P = 0.1;
  const PrimedState flat_p = primed_from_potentials(flat(1.0));
  const ReducedResiduals r = ceq_residuals(flat_p, fl, k);
  CHECK(r.rF == doctest::Approx(-0.5 * k.coupling() * 1.3).epsilon(1e-15));

  std::mt19937_64 rng(83);
  for (int n = 0; n < 200; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, false);
    const PrimedState s = to_primed(a.jet, a.Omega, k);
    CHECK(same(primed_reduced_residuals(s, a.fluid, a.Omega, k),
               ceq_residuals(s, a.fluid, k)));
  }
}

TEST_CASE("Kerr seen from a rotating frame") {
  const Constants k;
  for (double Om : {0.05, -0.1}) {
    for (auto [w, z] : {std::pair{1.5, 0.3}, {2.5, -1.0}}) {
      const MetricJet kerr = oracle::kerr(1.0, 0.6, w, z);
      const PrimedState s = to_primed(kerr, Jet::constant(Om), k);
      const ReducedResiduals r = ceq_residuals(s, FluidPoint{}, k);
      CHECK(r.max_scaled() <= 1e-12);
    }
  }
}

TEST_CASE("primed equivalence map") {
  const Constants k;
  std::mt19937_64 rng(89);
  for (bool variable : {false, true}) {
    for (int n = 0; n < 300; ++n) {
      const AdmissibleState a = random_admissible_state(rng, k, variable);
      const EquivalenceReport rep =
          primed_equivalence_check(a.jet, a.fluid, a.Omega, k);
      CHECK(rep.determinant_error <= 1e-12);
      const double e4Fp = std::exp(4.0 * to_primed(a.jet, a.Omega, k).Fp.val);
      CHECK(std::abs(rep.expected_determinant - e4Fp) <= 1e-13 * e4Fp);
      CHECK(rep.forward_error <= 1e-10);
      CHECK(rep.inverse_error <= 1e-10);
    }
  }
}

TEST_CASE("primed defect identity in vacuum") {
  const Constants k;
  const double Om = 0.08;
  const JetSampler primed = [&](double w, double z) {
    return to_primed(oracle::kerr(1.0, 0.5, w, z), Jet::constant(Om), k)
        .potentials();
  };
  const FluidSampler vac = [&](double, double) {
    FluidPoint f;
    f.Omega = Om;
    return f;
  };
  const ConsistencyDefect d1 = primed_consistency_defect(primed, vac, k, 2.0, 0.7, 1e-2);
  const ConsistencyDefect d2 = primed_consistency_defect(primed, vac, k, 2.0, 0.7, 5e-3);
  CHECK(d1.hypothesis_holds);
  CHECK(d1.rhs == 0.0);
  CHECK(std::abs(d1.lhs) <= 1e-4);
  CHECK(std::abs(d1.lhs / d2.lhs) == doctest::Approx(4.0).epsilon(0.05));

  const FluidSampler spin = [&](double, double) {
    FluidPoint f;
    f.Omega = Om;
    f.dOmega_z = 0.01;
    return f;
  };
  const ConsistencyDefect d3 = primed_consistency_defect(primed, spin, k, 2.0, 0.7, 1e-2);
  CHECK_FALSE(d3.hypothesis_holds);
}

TEST_CASE("corotating coordinates") {
  const Constants k;
  const TransformReport still = verify_transform(flat(1.0), 0.0, k);
  CHECK(still.Fp == 0.0);
  CHECK(still.Ap == 0.0);
  CHECK(still.max_error() == 0.0);

  std::mt19937_64 rng(97);
  int tested = 0;
  for (int n = 0; n < 300; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, false);
    for (double Om : {a.Omega.val, 0.3}) {
      if (lorentz_e2G(a.jet, Om, k) <= 0.0) continue;
      const TransformReport rep = verify_transform(a.jet, Om, k);
      CHECK(rep.square_identity <= 1e-12);
      CHECK(rep.inverse_identity <= 1e-12);
      CHECK(rep.mixed_identity <= 1e-12);
      CHECK(rep.lewis_route <= 1e-12);
      CHECK(rep.g_minus_fp <= 1e-12);
      CHECK(rep.velocity_error <= 1e-12);
      CHECK(rep.U_corotating[1] == 0.0);
      CHECK(rep.U_corotating[3] == 0.0);
      ++tested;
    }
  }
  CHECK(tested > 300);

  try {
    verify_transform(flat(3.0), 0.5, k);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::corotation_breakdown);
  }
  try {
    verify_transform(flat(1.0), Jet{0.1, 0.01, 0.0, 0.0, 0.0, 0.0}, k);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::hypothesis_violation);
  }
}

TEST_CASE("line element with a position-dependent angular velocity") {
  const Constants k;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const AdmissibleState a = random_admissible_state(rng, k, true);
    const std::array<double, 4> dx = {U(rng), U(rng), U(rng), U(rng)};
    const double t = 1.0 + 2.0 * std::abs(U(rng));
    const LineElementDefect d = corotating_line_element(a.jet, a.Omega, t, dx, k);
    CHECK(std::abs(d.difference - d.exact_extra) <=
          1e-12 * (1.0 + std::abs(d.exact_extra)));
    CHECK(std::abs(d.difference) > 1e-6);
  }
  // With A = 0 and no z dependence of Omega the diagonal form is exact.
  // Editing A can push the frame past the light cylinder; redraw until not.
  auto modified = [&](double A, double Omega_z) {
    for (;;) {
      AdmissibleState a = random_admissible_state(rng, k, true);
      a.jet.A = Jet::constant(A);
      a.Omega.z = Omega_z;
      try {
        lorentz_G(a.jet, a.Omega.val, k);
        return a;
      } catch (const Error&) {
      }
    }
  };
  for (int n = 0; n < 50; ++n) {
    const AdmissibleState a = modified(0.0, 0.0);
    const std::array<double, 4> dx = {U(rng), U(rng), U(rng), U(rng)};
    const LineElementDefect d = corotating_line_element(a.jet, a.Omega, 1.7, dx, k);
    CHECK(std::abs(d.difference - d.diagonal_extra) <=
          1e-12 * (1.0 + std::abs(d.difference)));
  }
  // Otherwise the diagonal form misses terms.
  const AdmissibleState a = modified(0.3, 0.2);
  const LineElementDefect d =
      corotating_line_element(a.jet, a.Omega, 1.0, {0.5, 0.4, 0.3, 0.6}, k);
  CHECK(std::abs(d.difference - d.diagonal_extra) > 1e-3);
}
