#include "astar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "astar/corotating.hpp"
#include "astar/errors.hpp"
#include "astar/reduced_system.hpp"

namespace astar {

namespace {

// Below this the brute-force discrepancy is round-off and carries no order.
constexpr double kRoundOff = 1e-12;

double christoffel_gap(const MetricJet& jet) {
  const Christoffel a = christoffel_lanczos(jet);
  const Christoffel b = christoffel_lewis(lanczos_to_lewis(jet));
  double m = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      for (int la = 0; la < 4; ++la) {
        const double x = a(mu, nu, la), y = b(mu, nu, la);
        m = std::max(m, std::abs(x - y) / (1.0 + std::abs(x) + std::abs(y)));
      }
    }
  }
  return m;
}

double trace_gap(const AdmissibleState& s, const Constants& k) {
  const StressEnergy T = stress_energy(s.jet, s.fluid, k);
  const FluidPoint& fl = s.fluid;
  const double om = s.Omega.val / k.c;
  const double e2F = std::exp(2.0 * s.jet.F.val);
  const double e2G = lorentz_e2G(s.jet, s.Omega.val, k);
  const double b = 1.0 + om * s.jet.A.val;
  const double p = s.jet.Pi.val;
  const double shown =
      (fl.eps + fl.P) / e2G * (e2F * b * b - om * om * p * p / e2F) -
      4.0 * fl.P;
  const double target = fl.eps - 3.0 * fl.P;
  const double mag = fl.eps + 4.0 * fl.P;
  return std::max(scaled_error(T.trace, target, {mag}),
                  scaled_error(shown, target, {mag}));
}

}  // namespace

SuiteReport run_identity_suite(std::uint64_t seed, int points, double tol,
                               const Constants& k) {
  SuiteReport rep;
  rep.seed = seed;
  rep.points = points;
  rep.tol = tol;
  const std::vector<std::string> names = {
      "pi_square",      "sigma_routes",       "stress_identity",
      "ricci_identity", "trace",              "christoffel_routes",
      "primed_pi_square", "primed_l",         "square_identity",
      "mixed_identity", "sigma_split"};
  for (const auto& n : names) rep.checks.push_back({n, 0.0});

  std::mt19937_64 rng(seed);
  for (int n = 0; n < points; ++n) {
    const AdmissibleState s = random_admissible_state(rng, k, false);
    const AdmissibleState v = random_admissible_state(rng, k, true);
    const MetricJet& j = s.jet;
    const LewisState ls = lanczos_to_lewis(j);
    const double f = ls.f.val, kk = ls.k.val, l = ls.l.val;
    const double P2 = j.Pi.val * j.Pi.val;

    double dfdl = 0.0;
    for (int c : {1, 3}) {
      dfdl += std::abs(ls.f.d(c) * ls.l.d(c)) + ls.k.d(c) * ls.k.d(c);
    }
    const IdentityReport ids = identity_suite(j, s.fluid, k);
    const PrimedState ps = to_primed(j, s.Omega, k);
    const double fp = ps.fp.val, kp = ps.kp.val, lp = ps.lp.val;
    const double e2Fp = std::exp(2.0 * ps.Fp.val);
    const double lp_shown =
        -e2Fp * ps.Ap.val * ps.Ap.val + P2 / e2Fp;
    const TransformReport tr = verify_transform(j, s.Omega.val, k);
    const PrimedState pv = to_primed(v.jet, v.Omega, k);
    const CorrectionTerms ct = correction_terms(pv, v.Omega, k);
    const double sig = sigma(lanczos_to_lewis(v.jet));

    const double err[] = {
        scaled_error(f * l + kk * kk, P2, {f * l, kk * kk, P2}),
        scaled_error(sigma(ls), sigma_from_lanczos(j), {dfdl}),
        ids.stress_identity,
        ids.ricci_identity,
        trace_gap(s, k),
        christoffel_gap(j),
        scaled_error(fp * lp + kp * kp, P2, {fp * lp, kp * kp, P2}),
        scaled_error(lp, lp_shown, {lp, lp_shown}),
        tr.square_identity,
        tr.mixed_identity,
        scaled_error(sig, ct.sigma_p + ct.W1, {sig, ct.sigma_p, ct.W1}),
    };
    for (std::size_t c = 0; c < names.size(); ++c) {
      rep.checks[c].max_error = std::max(rep.checks[c].max_error, err[c]);
      if (!(err[c] <= tol) && !rep.first_failure) {
        rep.first_failure =
            IdentityFailure{names[c], n, err[c], c == names.size() - 1 ? v : s};
      }
    }
  }
  return rep;
}

RicciStudy ricci_convergence(const std::vector<double>& h,
                             const MetricSampler& field, double w, double z) {
  if (h.empty()) fail(ErrorKind::config, "no step sizes given");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || (i > 0 && !(h[i] < h[i - 1]))) {
      fail(ErrorKind::config, "step sizes must be positive and decreasing");
    }
  }
  RicciStudy st;
  st.fields = 1;
  st.min_order = std::numeric_limits<double>::infinity();
  const RicciComponents R = ricci_closed_form(lanczos_to_lewis(field(w, z)));
  std::vector<double> e;
  for (double hh : h) {
    e.push_back(max_abs_diff(ricci_brute_force(field, w, z, hh), R));
    st.rows.push_back({hh, e.back()});
  }
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i] <= kRoundOff) continue;
    const double order = std::log(e[i] / e[i + 1]) / std::log(h[i] / h[i + 1]);
    st.min_order = std::min(st.min_order, order);
  }
  return st;
}

RicciStudy ricci_convergence(const std::vector<double>& h, int fields,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> W(0.8, 1.4), Z(-0.4, 0.4);
  RicciStudy all;
  all.min_order = std::numeric_limits<double>::infinity();
  for (double hh : h) all.rows.push_back({hh, 0.0});
  for (int n = 0; n < fields; ++n) {
    const SmoothField field(rng);
    const double w = W(rng), z = Z(rng);
    const RicciStudy one = ricci_convergence(h, field, w, z);
    for (std::size_t i = 0; i < h.size(); ++i) {
      all.rows[i].max_discrepancy =
          std::max(all.rows[i].max_discrepancy, one.rows[i].max_discrepancy);
    }
    all.min_order = std::min(all.min_order, one.min_order);
  }
  all.fields = fields;
  return all;
}

}  // namespace astar
