#include "astar/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "astar/corotating.hpp"
#include "astar/parallel.hpp"

namespace astar {

void Grid2D::validate() const {
  if (!(wmax > 0.0) || !(zmax > 0.0) || !std::isfinite(wmax) ||
      !std::isfinite(zmax)) {
    fail(ErrorKind::config, "grid extents must be positive and finite");
  }
  if (nw < 16 || nz < 16) {
    fail(ErrorKind::config, "grid needs at least 16 cells in each direction");
  }
  if (nz % 2 != 0) {
    fail(ErrorKind::config, "grid.nz must be even so that z = 0 is a row");
  }
}

Field2D::Field2D(const Grid2D& g, double value)
    : ni_(g.nw + 1), nj_(g.nz + 1), data_(ni_ * nj_, value) {}

double Field2D::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Field2D::max_diff(const Field2D& a, const Field2D& b) {
  if (a.data_.size() != b.data_.size()) {
    fail(ErrorKind::numeric, "fields live on different grids");
  }
  double m = 0.0;
  for (std::size_t n = 0; n < a.data_.size(); ++n) {
    m = std::max(m, std::abs(a.data_[n] - b.data_[n]));
  }
  return m;
}

Jet OmegaProfile::jet(double w) const {
  if (rigid()) return Jet::constant(value);
  const Jet x = Jet::coord_w(w) / length;
  return value / (1.0 + square(x));
}

FieldState FieldState::flat(const Grid2D& grid) {
  FieldState s;
  s.grid = grid;
  s.F = Field2D(grid);
  s.A = Field2D(grid);
  s.K = Field2D(grid);
  s.rho = Field2D(grid);
  s.Pi = Field2D(grid);
  for (int i = 0; i <= grid.nw; ++i) {
    for (int j = 0; j <= grid.nz; ++j) s.Pi(i, j) = grid.w(i);
  }
  return s;
}

void fill_axis(Field2D& f, AxisRule rule) {
  for (int j = 0; j < f.nj(); ++j) {
    f(0, j) = rule == AxisRule::even ? (4.0 * f(1, j) - f(2, j)) / 3.0 : 0.0;
  }
}

namespace {

// Value at column i >= -1; column -1 mirrors column 1.
double at(const Field2D& f, int i, int j, AxisRule rule) {
  if (i >= 0) return f(i, j);
  return rule == AxisRule::odd ? -f(-i, j) : f(-i, j);
}

// First and second derivative along one direction at index n of [0, last],
// with a mirror ghost below 0 when `ghost` is set.
template <class V>
double d1(const V& v, int n, int last, bool ghost, double h) {
  if (n > 0 && n < last) return (v(n + 1) - v(n - 1)) / (2.0 * h);
  if (n == 0 && ghost) return (v(1) - v(-1)) / (2.0 * h);
  if (n == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
  return (3.0 * v(n) - 4.0 * v(n - 1) + v(n - 2)) / (2.0 * h);
}

template <class V>
double d2(const V& v, int n, int last, bool ghost, double h) {
  if ((n > 0 && n < last) || (n == 0 && ghost)) {
    return (v(n + 1) - 2.0 * v(n) + v(n - 1)) / (h * h);
  }
  if (n == 0) {
    return (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / (h * h);
  }
  return (2.0 * v(n) - 5.0 * v(n - 1) + 4.0 * v(n - 2) - v(n - 3)) / (h * h);
}

Jet jet_impl(const Field2D& f, const Grid2D& g, int i, int j, AxisRule rule,
             bool mixed) {
  const double hw = g.hw(), hz = g.hz();
  auto along_w = [&](int ii) { return at(f, ii, j, rule); };
  auto along_z = [&](int jj) { return f(i, jj); };
  Jet J;
  J.val = f(i, j);
  J.w = d1(along_w, i, g.nw, true, hw);
  J.ww = d2(along_w, i, g.nw, true, hw);
  J.z = d1(along_z, j, g.nz, false, hz);
  J.zz = d2(along_z, j, g.nz, false, hz);
  if (mixed) {
    auto dz_col = [&](int ii) {
      auto col = [&](int jj) { return at(f, ii, jj, rule); };
      return d1(col, j, g.nz, false, hz);
    };
    J.wz = d1(dz_col, i, g.nw, true, hw);
  }
  return J;
}

MetricJet metric_jet_impl(const FieldState& s, int i, int j, bool mixed) {
  const Grid2D& g = s.grid;
  return MetricJet{jet_impl(s.F, g, i, j, AxisRule::even, mixed),
                   jet_impl(s.A, g, i, j, AxisRule::quadratic, mixed),
                   jet_impl(s.K, g, i, j, AxisRule::even, mixed),
                   jet_impl(s.Pi, g, i, j, AxisRule::odd, mixed)};
}

// Runs fn, attaching the node position to errors raised without one.
template <class Fn>
auto at_node(const Grid2D& g, int i, int j, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.where()) throw;
    throw Error(e.kind(), e.detail(), Location{g.w(i), g.z(j)});
  }
}

ReducedResiduals residuals_from(const FieldState& s, const MetricJet& jet,
                                const FluidPoint& fluid, const Constants& k) {
  if (s.frame == Frame::primed) {
    return ceq_residuals(primed_from_potentials(jet), fluid, k);
  }
  return reduced_residuals(jet, fluid, k);
}

// Residual of one equation with its scale; the five-point variant leaves
// the mixed partials out so neighbours of the same colour are never read.
std::pair<double, double> equation_residual(const FieldState& s,
                                            const GridPhysics& ph, Equation eq,
                                            int i, int j, bool five_point) {
  const MetricJet jet = metric_jet_impl(s, i, j, !five_point);
  const ReducedResiduals r =
      residuals_from(s, jet, ph.fluid_at(s, i, j), ph.constants());
  switch (eq) {
    case Equation::F:
      return {r.rF, r.sF};
    case Equation::A:
      return {r.rA, r.sA};
    case Equation::Pi:
      return {r.rPi, r.sPi};
  }
  return {0.0, 1.0};
}

Field2D& unknown(FieldState& s, Equation eq) {
  switch (eq) {
    case Equation::F:
      return s.F;
    case Equation::A:
      return s.A;
    case Equation::Pi:
      return s.Pi;
  }
  return s.F;
}

AxisRule rule_of(Equation eq) {
  switch (eq) {
    case Equation::F:
      return AxisRule::even;
    case Equation::A:
      return AxisRule::quadratic;
    case Equation::Pi:
      return AxisRule::odd;
  }
  return AxisRule::even;
}

// d(residual)/d(value) of the Pi equation beyond the Laplacian.
double pi_shift(const FieldState& s, const GridPhysics& ph, int i, int j) {
  const double P = ph.fluid_at(s, i, j).P;
  if (P == 0.0) return 0.0;
  const double em = std::exp(2.0 * (s.K(i, j) - s.F(i, j)));
  return -2.0 * ph.constants().coupling() * em * P;
}

double max_interior_residual(const FieldState& s, const GridPhysics& ph,
                             Equation eq, const Forcing& forcing) {
  const Grid2D& g = s.grid;
  std::vector<double> row(g.nw + 1, 0.0);
  parallel_for(g.nw - 1, [&](int n) {
    const int i = n + 1;
    double m = 0.0;
    for (int j = 1; j < g.nz; ++j) {
      const auto [r, sc] = at_node(g, i, j, [&] {
        return equation_residual(s, ph, eq, i, j, false);
      });
      const double f = forcing ? (*forcing)(i, j) : 0.0;
      m = std::max(m, std::abs(r - f) / sc);
    }
    row[i] = m;
  });
  return *std::max_element(row.begin(), row.end());
}

}  // namespace

Jet grid_jet(const Field2D& f, const Grid2D& g, int i, int j, AxisRule rule) {
  return jet_impl(f, g, i, j, rule, true);
}

MetricJet grid_metric_jet(const FieldState& s, int i, int j) {
  return metric_jet_impl(s, i, j, true);
}

GridPhysics::GridPhysics(const EosSpec& eos, const Constants& k)
    : eos_(eos), k_(k), table_(eos, k) {}

FluidPoint GridPhysics::fluid_at(const FieldState& s, int i, int j) const {
  FluidPoint p;
  p.rho = s.rho(i, j);
  if (p.rho > 0.0) {
    p.P = eos_pressure(p.rho, eos_, k_).P;
    p.eps = k_.c * k_.c * p.rho;
    p.u = table_.u_of_rho(p.rho);
  }
  const Jet om = s.omega.jet(s.grid.w(i));
  p.Omega = om.val;
  p.dOmega_w = om.w;
  p.dOmega_z = om.z;
  return p;
}

ReducedResiduals node_residuals(const FieldState& s, const GridPhysics& ph,
                                int i, int j) {
  return at_node(s.grid, i, j, [&] {
    return residuals_from(s, grid_metric_jet(s, i, j), ph.fluid_at(s, i, j),
                          ph.constants());
  });
}

RelaxResult relax_elliptic(FieldState& s, Equation eq, int sweeps,
                           double relaxation, const GridPhysics& ph,
                           const Forcing& forcing) {
  const Grid2D& g = s.grid;
  Field2D& u = unknown(s, eq);
  const double base = -2.0 / (g.hw() * g.hw()) - 2.0 / (g.hz() * g.hz());
  double first = -1.0;
  RelaxResult out;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    std::vector<double> seen(g.nw + 1, 0.0);
    for (int color = 0; color < 2; ++color) {
      parallel_for(g.nw - 1, [&](int n) {
        const int i = n + 1;
        for (int j = 1 + (i + 1 + color) % 2; j < g.nz; j += 2) {
          const auto [r, sc] = at_node(g, i, j, [&] {
            return equation_residual(s, ph, eq, i, j, true);
          });
          const double res = r - (forcing ? (*forcing)(i, j) : 0.0);
          seen[i] = std::max(seen[i], std::abs(res) / sc);
          double diag = base;
          if (eq == Equation::Pi) diag += pi_shift(s, ph, i, j);
          u(i, j) -= relaxation * res / diag;
        }
      });
      fill_axis(u, rule_of(eq));
    }
    const double m = *std::max_element(seen.begin(), seen.end());
    if (first < 0.0) first = std::max(m, 1e-300);
    if (!std::isfinite(m) || m > 10.0 * first) {
      std::ostringstream os;
      os << "relaxation diverged: residual " << m << " after " << sweep + 1
         << " sweeps (initial " << first << ")";
      fail(ErrorKind::divergence, os.str());
    }
    out.iterations = sweep + 1;
  }
  out.residual = max_interior_residual(s, ph, eq, forcing);
  return out;
}

RelaxResult solve_elliptic_direct(FieldState& s, Equation eq, double tol,
                                  int max_iterations, const GridPhysics& ph,
                                  const Forcing& forcing) {
  const Grid2D& g = s.grid;
  Field2D& u = unknown(s, eq);
  const AxisRule rule = rule_of(eq);
  const int nj = g.nz + 1;
  const int n = (g.nw + 1) * nj;
  auto id = [nj](int i, int j) { return i * nj + j; };
  const double hw = g.hw(), hz = g.hz();

  RelaxResult out;
  out.residual = max_interior_residual(s, ph, eq, forcing);
  const double first = std::max(out.residual, 1e-300);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  while (out.residual > tol && out.iterations < max_iterations) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        const int row = id(i, j);
        if (!g.interior(i, j) && !(i == 0 && j > 0 && j < g.nz)) {
          trip.emplace_back(row, row, 1.0);
          continue;
        }
        if (i == 0) {
          if (rule == AxisRule::even) {
            trip.emplace_back(row, row, 3.0);
            trip.emplace_back(row, id(1, j), -4.0);
            trip.emplace_back(row, id(2, j), 1.0);
          } else {
            trip.emplace_back(row, row, 1.0);
          }
          continue;
        }
        const MetricJet jet = at_node(g, i, j, [&] {
          return metric_jet_impl(s, i, j, false);
        });
        const double p = jet.Pi.val;
        double bw = 0.0, bz = 0.0, shift = 0.0;
        if (eq == Equation::F) {
          bw = jet.Pi.w / p;
          bz = jet.Pi.z / p;
        } else if (eq == Equation::A) {
          bw = -jet.Pi.w / p + 4.0 * jet.F.w;
          bz = -jet.Pi.z / p + 4.0 * jet.F.z;
        } else {
          shift = pi_shift(s, ph, i, j);
        }
        trip.emplace_back(row, row,
                          -2.0 / (hw * hw) - 2.0 / (hz * hz) + shift);
        trip.emplace_back(row, id(i + 1, j), 1.0 / (hw * hw) + bw / (2.0 * hw));
        trip.emplace_back(row, id(i - 1, j), 1.0 / (hw * hw) - bw / (2.0 * hw));
        trip.emplace_back(row, id(i, j + 1), 1.0 / (hz * hz) + bz / (2.0 * hz));
        trip.emplace_back(row, id(i, j - 1), 1.0 / (hz * hz) - bz / (2.0 * hz));
        const auto [r, sc] = at_node(g, i, j, [&] {
          return equation_residual(s, ph, eq, i, j, true);
        });
        (void)sc;
        rhs[row] = -(r - (forcing ? (*forcing)(i, j) : 0.0));
      }
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(L);
      analyzed = true;
    }
    lu.factorize(L);
    if (lu.info() != Eigen::Success) {
      fail(ErrorKind::numeric, "sparse factorization failed");
    }
    const Eigen::VectorXd delta = lu.solve(rhs);
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) u(i, j) += delta[id(i, j)];
    }
    fill_axis(u, rule);
    ++out.iterations;
    out.residual = max_interior_residual(s, ph, eq, forcing);
    if (!std::isfinite(out.residual) || out.residual > 10.0 * first) {
      std::ostringstream os;
      os << "defect correction diverged: residual " << out.residual
         << " (initial " << first << ")";
      fail(ErrorKind::divergence, os.str());
    }
  }
  return out;
}

KTargets k_targets(const FieldState& s) {
  const Grid2D& g = s.grid;
  KTargets t{Field2D(g), Field2D(g)};
  parallel_for(g.nw, [&](int n) {
    const int i = n + 1;
    for (int j = 0; j <= g.nz; ++j) {
      const auto kt = at_node(g, i, j, [&] {
        const MetricJet jet = grid_metric_jet(s, i, j);
        validate(jet);
        return k_gradient_targets(k_right_sides(jet), jet.Pi.w, jet.Pi.z);
      });
      t.kt1(i, j) = kt[0];
      t.kt3(i, j) = kt[1];
    }
  });
  // kt1 is odd in w and kt3 even, so the axis takes 0 and an extrapolation.
  fill_axis(t.kt1, AxisRule::odd);
  fill_axis(t.kt3, AxisRule::even);
  return t;
}

Field2D integrate_K(const KTargets& t, const Grid2D& g, double K_O) {
  Field2D K(g);
  const int e = g.equator();
  const double hw = g.hw(), hz = g.hz();
  K(0, e) = K_O;
  for (int j = e + 1; j <= g.nz; ++j) {
    K(0, j) = K(0, j - 1) + 0.5 * hz * (t.kt3(0, j - 1) + t.kt3(0, j));
  }
  for (int j = e - 1; j >= 0; --j) {
    K(0, j) = K(0, j + 1) - 0.5 * hz * (t.kt3(0, j + 1) + t.kt3(0, j));
  }
  for (int j = 0; j <= g.nz; ++j) {
    for (int i = 1; i <= g.nw; ++i) {
      K(i, j) = K(i - 1, j) + 0.5 * hw * (t.kt1(i - 1, j) + t.kt1(i, j));
    }
  }
  return K;
}

Field2D integrate_K(const FieldState& s, double K_O) {
  return integrate_K(k_targets(s), s.grid, K_O);
}

double node_G(const FieldState& s, const GridPhysics& ph, int i, int j) {
  if (s.frame == Frame::primed) return s.F(i, j);
  MetricJet v{Jet::constant(s.F(i, j)), Jet::constant(s.A(i, j)),
              Jet::constant(s.K(i, j)), Jet::constant(s.Pi(i, j))};
  const double Om = s.omega.jet(s.grid.w(i)).val;
  return at_node(s.grid, i, j,
                 [&] { return lorentz_G(v, Om, ph.constants()); });
}

Field2D update_density(const FieldState& s, const GridPhysics& ph) {
  const Grid2D& g = s.grid;
  const double c2 = ph.constants().c * ph.constants().c;
  Field2D rho(g);
  parallel_for(g.nw + 1, [&](int i) {
    for (int j = 0; j <= g.nz; ++j) {
      const double u = c2 * (s.first_integral_const - node_G(s, ph, i, j));
      if (u > 0.0) {
        rho(i, j) =
            at_node(g, i, j, [&] { return ph.table().rho_of_u(u); });
      }
    }
  });
  return rho;
}

void SolverConfig::validate() const {
  grid.validate();
  eos.validate();
  k.validate();
  if (!(theta > 0.0 && theta <= 1.0)) {
    fail(ErrorKind::config, "solver.theta must lie in (0, 1]");
  }
  if (!(relaxation > 0.0 && relaxation < 2.0)) {
    fail(ErrorKind::config, "solver.relaxation must lie in (0, 2)");
  }
  if (!(tol_outer > 0.0)) {
    fail(ErrorKind::config, "solver.tol_outer must be positive");
  }
  if (max_outer < 1 || sor_sweeps < 1) {
    fail(ErrorKind::config, "iteration limits must be positive");
  }
  if (!(central_density >= 0.0) || !std::isfinite(central_density)) {
    fail(ErrorKind::config, "star.central_density must be non-negative");
  }
  if (!(seed_radius > 0.0)) {
    fail(ErrorKind::config, "star.seed_radius must be positive");
  }
  if (!std::isfinite(omega.value) || !std::isfinite(omega.length)) {
    fail(ErrorKind::config, "omega must be finite");
  }
  if (eos.kind == EosKind::dust &&
      (const_mode == ConstMode::fixed || central_density > 0.0)) {
    fail(ErrorKind::config,
         "dust has no enthalpy, so the first integral cannot fix a density");
  }
  if (!omega.rigid()) {
    if (frame == Frame::primed) {
      fail(ErrorKind::config,
           "the corotating frame needs a constant angular velocity");
    }
    if (!allow_differential) {
      fail(ErrorKind::hypothesis_violation,
           "differential rotation: the K integration is only consistent for "
           "rigid rotation; set solver.allow_differential to run anyway");
    }
  }
}

namespace {

MetricJet values_only(double F, double A, double K, double Pi) {
  return MetricJet{Jet::constant(F), Jet::constant(A), Jet::constant(K),
                   Jet::constant(Pi)};
}

// Leading-order asymptotics F = -M/r, A = -2 J w^2 / r^3, Pi = w on the
// outer boundary, with M and J from the source integrals of the rest-frame
// F and A equations.
void install_asymptotic_boundary(FieldState& s, const GridPhysics& ph) {
  const Grid2D& g = s.grid;
  const Constants& k = ph.constants();
  std::vector<double> m_row(g.nw + 1, 0.0), j_row(g.nw + 1, 0.0);
  parallel_for(g.nw - 1, [&](int n) {
    const int i = n + 1;
    for (int j = 1; j < g.nz; ++j) {
      if (s.rho(i, j) <= 0.0) continue;
      at_node(g, i, j, [&] {
        const MetricJet jet = rest_frame_jet(s, i, j, k);
        const ReducedResiduals r =
            reduced_residuals(jet, ph.fluid_at(s, i, j), k);
        const double p = jet.Pi.val;
        const double SF =
            jet.F.laplacian() + grad_dot(jet.F, jet.Pi) / p - r.rF;
        const double SA =
            jet.A.laplacian() - grad_dot(jet.Pi, jet.A) / p - r.rA;
        m_row[i] += 0.5 * p * SF;
        j_row[i] += 0.125 * p * SA;
        return 0;
      });
    }
  });
  double M = 0.0, J = 0.0;
  for (int i = 0; i <= g.nw; ++i) {
    M += m_row[i] * g.hw() * g.hz();
    J += j_row[i] * g.hw() * g.hz();
  }
  auto set = [&](int i, int j) {
    const double w = g.w(i), z = g.z(j);
    const double r = std::hypot(w, z);
    double F = -M / r, A = -2.0 * J * w * w / (r * r * r);
    if (s.frame == Frame::primed) {
      const Jet Om = Jet::constant(s.omega.value);
      const PrimedState p = at_node(g, i, j, [&] {
        return to_primed(values_only(F, A, s.K(i, j), w), Om, k);
      });
      F = p.Fp.val;
      A = p.Ap.val;
    }
    s.F(i, j) = F;
    s.A(i, j) = A;
    s.Pi(i, j) = w;
  };
  for (int i = 1; i <= g.nw; ++i) {
    set(i, 0);
    set(i, g.nz);
  }
  for (int j = 1; j < g.nz; ++j) set(g.nw, j);
  fill_axis(s.F, AxisRule::even);
  fill_axis(s.A, AxisRule::quadratic);
  fill_axis(s.Pi, AxisRule::odd);
}

double max_residual_of(const FieldState& s, const GridPhysics& ph,
                       double IterationRecord::*slot, Equation eq,
                       IterationRecord& rec) {
  const double v = max_interior_residual(s, ph, eq, std::nullopt);
  rec.*slot = v;
  return v;
}

}  // namespace

MetricJet rest_frame_jet(const FieldState& s, int i, int j,
                         const Constants& k) {
  const MetricJet jet = grid_metric_jet(s, i, j);
  if (s.frame == Frame::unprimed) return jet;
  return from_primed(primed_from_potentials(jet), s.omega.jet(s.grid.w(i)),
                     k);
}

SolveResult fixed_point_solve(const SolverConfig& cfg,
                              const std::optional<FieldState>& initial) {
  cfg.validate();
  const GridPhysics ph(cfg.eos, cfg.k);
  const Grid2D& g = cfg.grid;
  const double c2 = cfg.k.c * cfg.k.c;

  SolveResult res;
  FieldState& s = res.state;
  const bool seeded = !initial.has_value();
  if (initial) {
    s = *initial;
    if (s.grid.nw != g.nw || s.grid.nz != g.nz) {
      fail(ErrorKind::config, "initial state does not match the grid");
    }
  } else {
    s = FieldState::flat(g);
    for (int i = 0; i <= g.nw; ++i) {
      for (int j = 0; j <= g.nz; ++j) {
        const double r2 = (g.w(i) * g.w(i) + g.z(j) * g.z(j)) /
                          (cfg.seed_radius * cfg.seed_radius);
        s.rho(i, j) = cfg.central_density * std::max(0.0, 1.0 - r2);
      }
    }
  }
  s.grid = g;
  s.frame = cfg.frame;
  s.omega = cfg.omega;
  s.first_integral_const = cfg.first_integral_const;
  const bool vacuum = cfg.const_mode == ConstMode::central_density &&
                      cfg.central_density == 0.0;
  const double u_c = vacuum ? 0.0 : ph.table().u_of_rho(cfg.central_density);
  const double tol_inner = 0.1 * cfg.tol_outer;
  SolveReport& rep = res.report;

  try {
    for (int it = 1; it <= cfg.max_outer; ++it) {
      const FieldState old = s;
      IterationRecord rec;
      if (s.frame == Frame::unprimed && s.omega.value != 0.0) {
        // Every node must lie inside the light cylinder before the first
        // integral can be evaluated there.
        for (int i = 0; i <= g.nw; ++i) {
          for (int j = 0; j <= g.nz; ++j) node_G(s, ph, i, j);
        }
      }
      if (vacuum) {
        s.rho = Field2D(g);
      } else if (!(it == 1 && seeded)) {
        if (cfg.const_mode == ConstMode::central_density) {
          s.first_integral_const = node_G(s, ph, 0, g.equator()) + u_c / c2;
        }
        s.rho = update_density(s, ph);
      }
      if (cfg.boundary == BoundaryMode::asymptotic) {
        install_asymptotic_boundary(s, ph);
      }
      for (Equation eq : {Equation::F, Equation::A, Equation::Pi}) {
        if (cfg.inner == InnerSolver::direct) {
          solve_elliptic_direct(s, eq, tol_inner, 30, ph);
        } else {
          relax_elliptic(s, eq, cfg.sor_sweeps, cfg.relaxation, ph);
        }
      }
      if (cfg.k_mode == KMode::integrate) {
        const Field2D Kt = integrate_K(s);
        rec.k_mismatch = Field2D::max_diff(Kt, s.K);
        for (int i = 0; i <= g.nw; ++i) {
          for (int j = 0; j <= g.nz; ++j) {
            s.K(i, j) = (1.0 - cfg.theta) * s.K(i, j) + cfg.theta * Kt(i, j);
          }
        }
      }
      const double rho_scale = std::max(old.rho.max_abs(), 1e-300);
      rec.delta = std::max({Field2D::max_diff(old.F, s.F),
                            Field2D::max_diff(old.A, s.A),
                            Field2D::max_diff(old.Pi, s.Pi),
                            Field2D::max_diff(old.K, s.K),
                            Field2D::max_diff(old.rho, s.rho) / rho_scale});
      const double r = std::max(
          {max_residual_of(s, ph, &IterationRecord::rF, Equation::F, rec),
           max_residual_of(s, ph, &IterationRecord::rA, Equation::A, rec),
           max_residual_of(s, ph, &IterationRecord::rPi, Equation::Pi, rec)});
      rec.defect_L = grid_consistency_defect(s, ph).max_lhs;
      rep.history.push_back(rec);
      rep.outer_iters = it;
      if (std::max({rec.delta, r, rec.k_mismatch}) <= cfg.tol_outer) {
        rep.converged = true;
        rep.message = "converged";
        break;
      }
    }
    if (!rep.converged) {
      std::ostringstream os;
      os << "no convergence within " << cfg.max_outer << " outer iterations";
      rep.message = os.str();
    }
  } catch (const Error& e) {
    rep.converged = false;
    rep.failure = e.kind();
    rep.where = e.where();
    rep.message = e.what();
  }
  return res;
}

double ResidualReport::max_reduced() const {
  double m = 0.0;
  for (const auto& e : reduced) m = std::max(m, e.max);
  return m;
}

double ResidualReport::max_einstein() const {
  double m = 0.0;
  for (const auto& e : einstein) m = std::max(m, e.max);
  return m;
}

ResidualReport grid_residual_report(const FieldState& s, const GridPhysics& ph,
                                    const Forcing& forcing) {
  const Grid2D& g = s.grid;
  const Constants& k = ph.constants();
  constexpr int nr = 5, ne = 6;
  struct Row {
    double max[nr + ne] = {};
    double sq[nr + ne] = {};
    int arg[nr + ne] = {};
  };
  std::vector<Row> rows(g.nw + 1);
  parallel_for(g.nw - 1, [&](int n) {
    const int i = n + 1;
    Row& row = rows[i];
    for (int j = 1; j < g.nz; ++j) {
      at_node(g, i, j, [&] {
        const FluidPoint fl = ph.fluid_at(s, i, j);
        const ReducedResiduals r =
            residuals_from(s, grid_metric_jet(s, i, j), fl, k);
        const double fr = forcing ? (*forcing)(i, j) : 0.0;
        const EinsteinResiduals q =
            einstein_residuals(rest_frame_jet(s, i, j, k), fl, k);
        const auto qv = q.values();
        double v[nr + ne] = {std::abs(r.rF - fr) / r.sF,
                             std::abs(r.rA) / r.sA,
                             std::abs(r.rPi) / r.sPi,
                             std::abs(r.rKd) / r.sKd,
                             std::abs(r.rKe) / r.sKe};
        for (int c = 0; c < ne; ++c) v[nr + c] = std::abs(qv[c]) / q.scale[c];
        for (int c = 0; c < nr + ne; ++c) {
          row.sq[c] += v[c] * v[c];
          if (v[c] > row.max[c]) {
            row.max[c] = v[c];
            row.arg[c] = j;
          }
        }
        return 0;
      });
    }
  });
  static const char* names[nr + ne] = {"F",   "A",   "Pi",  "Kd",  "Ke", "Q00",
                                       "Q02", "Q22", "Q11", "Q33", "Q13"};
  const double count = static_cast<double>(g.nw - 1) * (g.nz - 1);
  ResidualReport rep;
  for (int c = 0; c < nr + ne; ++c) {
    EquationStats st;
    st.name = names[c];
    double sq = 0.0;
    for (int i = 1; i < g.nw; ++i) {
      sq += rows[i].sq[c];
      if (rows[i].max[c] > st.max) {
        st.max = rows[i].max[c];
        st.where = Location{g.w(i), g.z(rows[i].arg[c])};
      }
    }
    st.l2 = std::sqrt(sq / count);
    (c < nr ? rep.reduced : rep.einstein).push_back(st);
  }
  return rep;
}

GridDefect grid_consistency_defect(const FieldState& s, const GridPhysics& ph) {
  const Grid2D& g = s.grid;
  const KTargets t = k_targets(s);
  const double coupling = ph.constants().coupling();
  GridDefect d{Field2D(g), Field2D(g)};
  d.hypothesis_holds = s.omega.rigid() || s.rho.max_abs() == 0.0;
  const double hw = g.hw(), hz = g.hz();
  std::vector<double> lhs_row(g.nw + 1, 0.0), gap_row(g.nw + 1, 0.0);
  // The stencil must not reach the outer boundary: targets there come from
  // one-sided jets whose error does not difference away.
  parallel_for(g.nw - 3, [&](int n) {
    const int i = n + 2;
    for (int j = 2; j < g.nz - 1; ++j) {
      const double lhs = (t.kt1(i, j + 1) - t.kt1(i, j - 1)) / (2.0 * hz) -
                         (t.kt3(i + 1, j) - t.kt3(i - 1, j)) / (2.0 * hw);
      const MetricJet c = grid_metric_jet(s, i, j);
      const double P = ph.fluid_at(s, i, j).P;
      double rhs = 0.0;
      if (P != 0.0) {
        const double em = std::exp(2.0 * (c.K.val - c.F.val));
        rhs = 2.0 * coupling * em * P * c.Pi.val / c.Pi.grad_sq() *
              ((c.K.w - t.kt1(i, j)) * c.Pi.z - (c.K.z - t.kt3(i, j)) * c.Pi.w);
      }
      d.lhs(i, j) = lhs;
      d.rhs(i, j) = rhs;
      lhs_row[i] = std::max(lhs_row[i], std::abs(lhs));
      gap_row[i] = std::max(gap_row[i], std::abs(lhs - rhs));
    }
  });
  d.max_lhs = *std::max_element(lhs_row.begin(), lhs_row.end());
  d.max_gap = *std::max_element(gap_row.begin(), gap_row.end());
  return d;
}

}  // namespace astar
