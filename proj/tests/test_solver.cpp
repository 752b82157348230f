#include <cmath>
#include <numbers>

#include "astar/errors.hpp"
#include "astar/parallel.hpp"
#include "astar/solver.hpp"
#include "doctest.h"
#include "lane_emden.hpp"

using namespace astar;

namespace {

Jet wj(double w) { return Jet::coord_w(w); }
Jet zj(double z) { return Jet::coord_z(z); }

// Odd in w and harmonic: Re((w + i z)^3) = w^3 - 3 w z^2.
double harmonic_pi(double w, double z) {
  return w + 0.05 * (w * w * w - 3.0 * w * z * z);
}

Jet bump(double w, double z) {
  return 0.1 * exp(-(square(wj(w)) + square(zj(z))));
}

FieldState with_exact_F(const Grid2D& g) {
  FieldState s = FieldState::flat(g);
  for (int i = 0; i <= g.nw; ++i) {
    for (int j = 0; j <= g.nz; ++j) s.F(i, j) = bump(g.w(i), g.z(j)).val;
  }
  return s;
}

// Manufactured source: the continuous F residual of the bump, so the
// discrete solution differs from the bump by the truncation error only.
Field2D bump_forcing(const Grid2D& g, const Constants& k) {
  Field2D f(g);
  for (int i = 1; i < g.nw; ++i) {
    for (int j = 1; j < g.nz; ++j) {
      const MetricJet jet{bump(g.w(i), g.z(j)), Jet::constant(0.0),
                          Jet::constant(0.0), wj(g.w(i))};
      f(i, j) = reduced_residuals(jet, FluidPoint{}, k).rF;
    }
  }
  return f;
}

double mms_error(int n, InnerSolver inner) {
  const Grid2D g{1.0, 1.0, n, 2 * n};
  const GridPhysics ph(EosSpec{}, Constants{});
  const FieldState exact = with_exact_F(g);
  FieldState s = exact;
  for (int i = 1; i < g.nw; ++i) {
    for (int j = 1; j < g.nz; ++j) s.F(i, j) = 0.0;
  }
  const Field2D forcing = bump_forcing(g, ph.constants());
  if (inner == InnerSolver::direct) {
    solve_elliptic_direct(s, Equation::F, 1e-13, 50, ph, forcing);
  } else {
    relax_elliptic(s, Equation::F, 20 * n * n, 1.8, ph, forcing);
  }
  return Field2D::max_diff(s.F, exact.F);
}

SolverConfig weak_star(int nw) {
  SolverConfig c;
  c.grid = Grid2D{2.0, 2.0, nw, 2 * nw};
  c.eos.gamma = 5.0 / 3.0;
  c.eos.Acoef = 0.04;
  c.omega.value = 0.005;
  c.central_density = 1e-3;
  c.seed_radius = 1.0;
  c.max_outer = 200;
  return c;
}

SolverConfig vacuum(int nw) {
  SolverConfig c = weak_star(nw);
  c.central_density = 0.0;
  c.omega.value = 0.0;
  c.tol_outer = 1e-10;
  return c;
}

bool bitwise_equal(const FieldState& a, const FieldState& b) {
  for (int i = 0; i <= a.grid.nw; ++i) {
    for (int j = 0; j <= a.grid.nz; ++j) {
      if (a.F(i, j) != b.F(i, j) || a.A(i, j) != b.A(i, j) ||
          a.K(i, j) != b.K(i, j) || a.Pi(i, j) != b.Pi(i, j) ||
          a.rho(i, j) != b.rho(i, j)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(Grid2D{}.validate());
  CHECK_THROWS_AS((Grid2D{2.0, 2.0, 16, 31}.validate()), Error);
  CHECK_THROWS_AS((Grid2D{0.0, 2.0, 16, 32}.validate()), Error);
  CHECK_THROWS_AS((Grid2D{2.0, 2.0, 1, 32}.validate()), Error);
  const Grid2D g{2.0, 1.0, 8, 16};
  CHECK(g.w(8) == doctest::Approx(2.0));
  CHECK(g.z(0) == doctest::Approx(-1.0));
  CHECK(g.z(g.equator()) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("grid jets are exact on quadratics, inside and on the boundary") {
  const Grid2D g{1.0, 1.0, 8, 16};
  Field2D f(g);
  auto q = [](double w, double z) {
    return 1.0 + 0.3 * w * w - 0.2 * w * z + 0.7 * z * z + 0.4 * z;
  };
  for (int i = 0; i <= g.nw; ++i) {
    for (int j = 0; j <= g.nz; ++j) f(i, j) = q(g.w(i), g.z(j));
  }
  for (int i : {1, 4, 8}) {
    for (int j : {0, 5, 16}) {
      const double w = g.w(i), z = g.z(j);
      const Jet J = grid_jet(f, g, i, j, AxisRule::even);
      CHECK(J.val == doctest::Approx(q(w, z)));
      CHECK(J.w == doctest::Approx(0.6 * w - 0.2 * z).epsilon(1e-11));
      CHECK(J.z == doctest::Approx(-0.2 * w + 1.4 * z + 0.4).epsilon(1e-11));
      CHECK(J.ww == doctest::Approx(0.6).epsilon(1e-9));
      CHECK(J.zz == doctest::Approx(1.4).epsilon(1e-9));
    }
  }
}

TEST_CASE("axis rules follow the parity of each field") {
  const Grid2D g{1.0, 1.0, 8, 16};
  Field2D even(g), quad(g), odd(g);
  for (int i = 0; i <= g.nw; ++i) {
    for (int j = 0; j <= g.nz; ++j) {
      const double w = g.w(i), z = g.z(j);
      even(i, j) = 2.0 + w * w * (1.0 + z);
      quad(i, j) = w * w * (3.0 - z);
      odd(i, j) = w * (1.0 + z * z);
    }
  }
  Field2D e2 = even, q2 = quad, o2 = odd;
  for (int j = 0; j <= g.nz; ++j) {
    e2(0, j) = q2(0, j) = o2(0, j) = 99.0;
  }
  fill_axis(e2, AxisRule::even);
  fill_axis(q2, AxisRule::quadratic);
  fill_axis(o2, AxisRule::odd);
  for (int j = 0; j <= g.nz; ++j) {
    // (4 f1 - f2) / 3 is exact for an even quadratic in w.
    CHECK(e2(0, j) == doctest::Approx(even(0, j)).epsilon(1e-13));
    CHECK(q2(0, j) == 0.0);
    CHECK(o2(0, j) == 0.0);
  }
  const int j = 5;
  const double z = g.z(j);
  const Jet E = grid_jet(even, g, 0, j, AxisRule::even);
  CHECK(E.w == 0.0);
  CHECK(E.ww == doctest::Approx(2.0 * (1.0 + z)).epsilon(1e-11));
  const Jet O = grid_jet(odd, g, 0, j, AxisRule::odd);
  CHECK(O.w == doctest::Approx(1.0 + z * z).epsilon(1e-11));
  const Jet Q = grid_jet(quad, g, 0, j, AxisRule::quadratic);
  CHECK(Q.ww == doctest::Approx(2.0 * (3.0 - z)).epsilon(1e-11));
}

TEST_CASE("flat space is a fixed point of every inner solver") {
  const Grid2D g{2.0, 2.0, 16, 32};
  const GridPhysics ph(EosSpec{}, Constants{});
  for (Equation eq : {Equation::F, Equation::A, Equation::Pi}) {
    FieldState s = FieldState::flat(g);
    const FieldState before = s;
    relax_elliptic(s, eq, 20, 1.6, ph);
    CHECK(bitwise_equal(s, before));
    solve_elliptic_direct(s, eq, 1e-12, 5, ph);
    CHECK(Field2D::max_diff(s.F, before.F) == 0.0);
    CHECK(Field2D::max_diff(s.A, before.A) == 0.0);
    CHECK(Field2D::max_diff(s.Pi, before.Pi) <= 1e-15);
  }
  FieldState s = FieldState::flat(g);
  const ResidualReport r = grid_residual_report(s, ph);
  CHECK(r.max_reduced() == 0.0);
  CHECK(r.max_einstein() <= 1e-15);
  CHECK(r.reduced.size() == 5);
  CHECK(r.einstein.size() == 6);
}

TEST_CASE("a harmonic Pi is recovered by both inner solvers") {
  const Grid2D g{1.0, 1.0, 16, 32};
  const GridPhysics ph(EosSpec{}, Constants{});
  FieldState exact = FieldState::flat(g);
  for (int i = 0; i <= g.nw; ++i) {
    for (int j = 0; j <= g.nz; ++j) {
      exact.Pi(i, j) = harmonic_pi(g.w(i), g.z(j));
    }
  }
  // The five-point Laplacian is exact on cubics, so the discrete solution is
  // the continuous one.
  SUBCASE("direct") {
    FieldState s = FieldState::flat(g);
    for (int j = 0; j <= g.nz; ++j) s.Pi(g.nw, j) = exact.Pi(g.nw, j);
    for (int i = 0; i <= g.nw; ++i) {
      s.Pi(i, 0) = exact.Pi(i, 0);
      s.Pi(i, g.nz) = exact.Pi(i, g.nz);
    }
    const RelaxResult r = solve_elliptic_direct(s, Equation::Pi, 1e-14, 20, ph);
    CHECK(r.residual <= 1e-12);
    CHECK(Field2D::max_diff(s.Pi, exact.Pi) <= 1e-12);
  }
  SUBCASE("sor") {
    FieldState s = exact;
    for (int i = 1; i < g.nw; ++i) {
      for (int j = 1; j < g.nz; ++j) s.Pi(i, j) = g.w(i);
    }
    relax_elliptic(s, Equation::Pi, 3000, 1.8, ph);
    CHECK(Field2D::max_diff(s.Pi, exact.Pi) <= 1e-11);
  }
}

TEST_CASE("manufactured F converges at second order") {
  const double e16 = mms_error(16, InnerSolver::direct);
  const double e32 = mms_error(32, InnerSolver::direct);
  const double e64 = mms_error(64, InnerSolver::direct);
  CHECK(e16 > 0.0);
  CHECK(e16 / e32 == doctest::Approx(4.0).epsilon(0.125));
  CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.125));
  // SOR reaches the same discrete solution.
  CHECK(mms_error(16, InnerSolver::sor) ==
        doctest::Approx(e16).epsilon(1e-6));
}

TEST_CASE("K integration reproduces a known potential") {
  const Grid2D g{1.0, 1.0, 16, 32};
  SUBCASE("zero targets give zero") {
    const KTargets t{Field2D(g), Field2D(g)};
    CHECK(integrate_K(t, g).max_abs() == 0.0);
    CHECK(integrate_K(t, g, 0.25).max_abs() == 0.25);
  }
  SUBCASE("flat space has K = 0") {
    CHECK(integrate_K(FieldState::flat(g)).max_abs() == 0.0);
  }
  SUBCASE("targets linear along each path integrate exactly") {
    KTargets t{Field2D(g), Field2D(g)};
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        const double w = g.w(i), z = g.z(j);
        t.kt1(i, j) = 0.04 * w * (1.0 + 0.5 * z);
        t.kt3(i, j) = 0.01 * w * w;
      }
    }
    const Field2D K = integrate_K(t, g);
    double err = 0.0;
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        const double w = g.w(i), z = g.z(j);
        err = std::max(err, std::abs(K(i, j) - 0.02 * w * w * (1.0 + 0.5 * z)));
      }
    }
    CHECK(err <= 1e-15);
  }
  SUBCASE("smooth targets converge at second order") {
    auto error = [](int n) {
      const Grid2D h{1.0, 1.0, n, 2 * n};
      KTargets t{Field2D(h), Field2D(h)};
      for (int i = 0; i <= h.nw; ++i) {
        for (int j = 0; j <= h.nz; ++j) {
          const double w = h.w(i), z = h.z(j);
          // K = sin(w)^2 cos(z) + 0.1 sin(z)
          t.kt1(i, j) = std::sin(2.0 * w) * std::cos(z);
          t.kt3(i, j) = -std::sin(w) * std::sin(w) * std::sin(z) +
                        0.1 * std::cos(z);
        }
      }
      const Field2D K = integrate_K(t, h);
      double e = 0.0;
      for (int i = 0; i <= h.nw; ++i) {
        for (int j = 0; j <= h.nz; ++j) {
          const double w = h.w(i), z = h.z(j);
          const double exact =
              std::sin(w) * std::sin(w) * std::cos(z) + 0.1 * std::sin(z);
          e = std::max(e, std::abs(K(i, j) - exact));
        }
      }
      return e;
    };
    const double r = error(16) / error(32);
    CHECK(r == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("density follows the first integral") {
  const Grid2D g{2.0, 2.0, 8, 16};
  EosSpec eos;
  eos.gamma = 5.0 / 3.0;
  eos.Acoef = 0.04;
  const GridPhysics ph(eos, Constants{});
  SUBCASE("static flat space gives a uniform density") {
    FieldState s = FieldState::flat(g);
    s.first_integral_const = 0.01;
    const Field2D rho = update_density(s, ph);
    const double expect = ph.table().rho_of_u(0.01);
    CHECK(expect > 0.0);
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        CHECK(rho(i, j) == doctest::Approx(expect).epsilon(1e-14));
      }
    }
    s.first_integral_const = -0.01;
    CHECK(update_density(s, ph).max_abs() == 0.0);
  }
  SUBCASE("rotation in flat space pushes matter outward") {
    FieldState s = FieldState::flat(g);
    s.omega.value = 0.3;
    s.first_integral_const = 0.03;
    const Field2D rho = update_density(s, ph);
    for (int i = 0; i <= g.nw; ++i) {
      const double w = g.w(i);
      // Flat space: e^{2G} = 1 - Omega^2 w^2.
      const double G = 0.5 * std::log(1.0 - 0.09 * w * w);
      const double u = 0.03 - G;
      const double expect = u > 0.0 ? ph.table().rho_of_u(u) : 0.0;
      CHECK(rho(i, 3) == doctest::Approx(expect).epsilon(1e-13));
    }
    for (int i = 1; i <= g.nw; ++i) CHECK(rho(i, 3) > rho(i - 1, 3));
  }
  SUBCASE("the corotating frame reads G from F'") {
    FieldState s = FieldState::flat(g);
    s.frame = Frame::primed;
    s.first_integral_const = 0.0;
    s.F(2, 3) = -0.02;
    const Field2D rho = update_density(s, ph);
    CHECK(rho(2, 3) == doctest::Approx(ph.table().rho_of_u(0.02)));
    CHECK(rho(1, 3) == 0.0);
  }
}

TEST_CASE("flat vacuum solve converges at once") {
  const SolveResult r = fixed_point_solve(vacuum(16));
  CHECK(r.report.converged);
  CHECK(r.report.outer_iters <= 5);
  const ResidualReport rep =
      grid_residual_report(r.state, GridPhysics(EosSpec{}, Constants{}));
  CHECK(rep.max_reduced() <= 1e-10);
  CHECK(rep.max_einstein() <= 1e-10);
}

TEST_CASE("weak rotating star on a coarse grid") {
  const SolverConfig c = weak_star(16);
  const SolveResult r = fixed_point_solve(c);
  REQUIRE(r.report.converged);
  const FieldState& s = r.state;
  const Grid2D& g = s.grid;
  const GridPhysics ph(c.eos, c.k);
  CHECK(s.rho(0, g.equator()) == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(s.F(0, g.equator()) < 0.0);
  for (int i = 0; i <= g.nw; ++i) {
    for (int j = 0; j <= g.nz; ++j) {
      CHECK(std::abs(s.F(i, j) - s.F(i, g.nz - j)) <= 1e-10);
      CHECK(std::abs(s.rho(i, j) - s.rho(i, g.nz - j)) <= 1e-12);
    }
  }
  SUBCASE("the axis stays regular") {
    for (int j = 0; j <= g.nz; ++j) {
      CHECK(s.A(0, j) == 0.0);
      CHECK(s.Pi(0, j) == 0.0);
      CHECK(3.0 * s.F(0, j) - 4.0 * s.F(1, j) + s.F(2, j) ==
            doctest::Approx(0.0).epsilon(1e-15));
    }
  }
  SUBCASE("rotation drags the frames") {
    // Zero-angular-momentum observers turn at A e^{4F} / Pi^2, in the
    // direction of the star but more slowly.
    for (int i = 1; i < g.nw; ++i) {
      const int j = g.equator();
      const double drag =
          s.A(i, j) * std::exp(4.0 * s.F(i, j)) / (s.Pi(i, j) * s.Pi(i, j));
      CHECK(drag > 0.0);
      CHECK(drag < c.omega.value);
    }
  }
  SUBCASE("reversing the rotation mirrors A") {
    SolverConfig m = c;
    m.omega.value = -c.omega.value;
    const SolveResult rm = fixed_point_solve(m);
    REQUIRE(rm.report.converged);
    double d = 0.0;
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        d = std::max(d, std::abs(rm.state.A(i, j) + s.A(i, j)));
        d = std::max(d, std::abs(rm.state.F(i, j) - s.F(i, j)));
      }
    }
    CHECK(d <= 1e-14);
  }
  SUBCASE("the corotating solve describes the same star") {
    SolverConfig p = c;
    p.frame = Frame::primed;
    const SolveResult rp = fixed_point_solve(p);
    REQUIRE(rp.report.converged);
    double dF = 0.0, dA = 0.0;
    for (int i = 1; i < g.nw; ++i) {
      for (int j = 1; j < g.nz; ++j) {
        const MetricJet m = rest_frame_jet(rp.state, i, j, c.k);
        dF = std::max(dF, std::abs(m.F.val - s.F(i, j)));
        dA = std::max(dA, std::abs(m.A.val - s.A(i, j)));
      }
    }
    CHECK(dF <= 1e-7);
    CHECK(dA <= 1e-7);
  }
  SUBCASE("rigid rotation keeps the defect identity") {
    const GridDefect d = grid_consistency_defect(s, ph);
    CHECK(d.hypothesis_holds);
    CHECK(d.max_lhs <= 1e-5);
  }
}

TEST_CASE("solves are deterministic and independent of the thread count") {
  const SolverConfig c = weak_star(16);
  const int saved = jobs();
  set_jobs(1);
  const SolveResult a = fixed_point_solve(c);
  const SolveResult b = fixed_point_solve(c);
  set_jobs(3);
  const SolveResult d = fixed_point_solve(c);
  set_jobs(saved);
  CHECK(a.report.outer_iters == d.report.outer_iters);
  CHECK(bitwise_equal(a.state, b.state));
  CHECK(bitwise_equal(a.state, d.state));
}

TEST_CASE("differential rotation is refused unless allowed") {
  SolverConfig c = weak_star(16);
  c.omega.length = 1.0;
  try {
    fixed_point_solve(c);
    FAIL("expected a hypothesis violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::hypothesis_violation);
  }
  c.allow_differential = true;
  c.max_outer = 3;
  const SolveResult r = fixed_point_solve(c);
  CHECK(r.report.outer_iters >= 1);
  const GridDefect d =
      grid_consistency_defect(r.state, GridPhysics(c.eos, c.k));
  CHECK_FALSE(d.hypothesis_holds);
  c.frame = Frame::primed;
  try {
    fixed_point_solve(c);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("reaching past the light cylinder is reported with its node") {
  SolverConfig c = weak_star(16);
  c.omega.value = 0.6;
  const SolveResult r = fixed_point_solve(c);
  CHECK_FALSE(r.report.converged);
  REQUIRE(r.report.failure.has_value());
  CHECK(*r.report.failure == ErrorKind::causal_limit);
  REQUIRE(r.report.where.has_value());
  CHECK(0.6 * r.report.where->w >= 0.9);
}

TEST_CASE("non-convergence is reported, not thrown") {
  SolverConfig c = weak_star(16);
  c.max_outer = 2;
  const SolveResult r = fixed_point_solve(c);
  CHECK_FALSE(r.report.converged);
  CHECK_FALSE(r.report.failure.has_value());
  CHECK(r.report.outer_iters == 2);
  CHECK(r.report.history.size() == 2);
}

TEST_CASE("invalid solver settings are config errors") {
  SolverConfig c = weak_star(16);
  c.theta = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = weak_star(16);
  c.relaxation = 2.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = weak_star(16);
  c.eos.kind = EosKind::dust;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("Lane-Emden reference reproduces the closed-form polytropes") {
  // n = 0: theta = 1 - xi^2/6; n = 1: theta = sin(xi)/xi.
  const oracle::LaneEmden n0 = oracle::lane_emden(0.0);
  CHECK(n0.xi1 == doctest::Approx(std::sqrt(6.0)).epsilon(1e-6));
  CHECK(n0.mass_factor == doctest::Approx(2.0 * std::sqrt(6.0)).epsilon(1e-6));
  const oracle::LaneEmden n1 = oracle::lane_emden(1.0);
  CHECK(n1.xi1 == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  CHECK(n1.mass_factor == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  // Mass and central density invert each other.
  const oracle::LaneEmden le = oracle::lane_emden(1.5);
  const double a = oracle::lane_emden_alpha(0.04, 5.0 / 3.0, 2e-3, 1.0);
  const double M = 4.0 * std::numbers::pi * a * a * a * 2e-3 * le.mass_factor;
  CHECK(oracle::lane_emden_rho_c(M, 0.04, 5.0 / 3.0, 1.0, le) ==
        doctest::Approx(2e-3).epsilon(1e-12));
}

TEST_CASE("SOR and direct inner solvers reach the same star") {
  SolverConfig c = weak_star(16);
  const SolveResult d = fixed_point_solve(c);
  c.inner = InnerSolver::sor;
  c.sor_sweeps = 300;
  const SolveResult s = fixed_point_solve(c);
  REQUIRE(d.report.converged);
  REQUIRE(s.report.converged);
  CHECK(Field2D::max_diff(d.state.F, s.state.F) <= 1e-7);
  CHECK(Field2D::max_diff(d.state.A, s.state.A) <= 1e-7);
}
