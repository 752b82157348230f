#pragma once

#include <optional>
#include <string>
#include <vector>

#include "astar/errors.hpp"
#include "astar/matter.hpp"
#include "astar/reduced_system.hpp"

namespace astar {

/// Node-centred grid on w in [0, wmax], z in [-zmax, zmax]. Node i = 0 lies
/// on the axis; i = nw, j = 0 and j = nz are the outer boundary. nz is even
/// so the equatorial plane z = 0 is the row j = nz / 2.
struct Grid2D {
  double wmax = 2.0;
  double zmax = 2.0;
  int nw = 64;
  int nz = 128;

  double hw() const { return wmax / nw; }
  double hz() const { return 2.0 * zmax / nz; }
  double w(int i) const { return i * hw(); }
  double z(int j) const { return -zmax + j * hz(); }
  int equator() const { return nz / 2; }
  bool interior(int i, int j) const {
    return i >= 1 && i < nw && j >= 1 && j < nz;
  }
  void validate() const;
};

class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid2D& g, double value = 0.0);

  double& operator()(int i, int j) { return data_[i * nj_ + j]; }
  double operator()(int i, int j) const { return data_[i * nj_ + j]; }
  int ni() const { return ni_; }
  int nj() const { return nj_; }
  double max_abs() const;
  /// max |a - b| over all nodes.
  static double max_diff(const Field2D& a, const Field2D& b);

 private:
  int ni_ = 0;
  int nj_ = 0;
  std::vector<double> data_;
};

enum class Frame { unprimed, primed };

/// Omega(w) = value / (1 + (w / length)^2); rigid when length <= 0.
struct OmegaProfile {
  double value = 0.0;
  double length = 0.0;

  bool rigid() const { return length <= 0.0 || value == 0.0; }
  /// Omega with its w and z partials at radius w.
  Jet jet(double w) const;
};

struct FieldState {
  Grid2D grid;
  Field2D F, A, K, Pi, rho;
  Frame frame = Frame::unprimed;
  OmegaProfile omega;
  double first_integral_const = 0.0;

  /// F = A = K = rho = 0 and Pi = w.
  static FieldState flat(const Grid2D& grid);
};

/// How a field continues across the axis. Even fields (F, K, rho) take
/// their axis value from the one-sided condition d_w = 0; A ~ w^2 is even
/// but vanishes there; Pi is odd.
enum class AxisRule { even, quadratic, odd };

/// Rewrites the axis column of f from the nodes next to it.
void fill_axis(Field2D& f, AxisRule rule);

/// Jet of a grid field: central differences inside, second-order one-sided
/// differences on the outer boundary, mirror ghosts on the axis.
Jet grid_jet(const Field2D& f, const Grid2D& g, int i, int j, AxisRule rule);
MetricJet grid_metric_jet(const FieldState& s, int i, int j);

/// EOS, constants and the enthalpy table shared by all grid kernels.
class GridPhysics {
 public:
  GridPhysics(const EosSpec& eos, const Constants& k);

  const EosSpec& eos() const { return eos_; }
  const Constants& constants() const { return k_; }
  const EnthalpyTable& table() const { return table_; }

  FluidPoint fluid_at(const FieldState& s, int i, int j) const;

 private:
  EosSpec eos_;
  Constants k_;
  EnthalpyTable table_;
};

/// Residuals of the field equations at one node in the state's frame: the
/// reduced system in the rest frame, the corotating one when primed.
ReducedResiduals node_residuals(const FieldState& s, const GridPhysics& ph,
                                int i, int j);

enum class Equation { F, A, Pi };

struct RelaxResult {
  int iterations = 0;
  /// Largest |residual| / scale over the interior after the last pass.
  double residual = 0.0;
};

/// Optional extra source per node subtracted from the residual; used to
/// manufacture solutions.
using Forcing = std::optional<Field2D>;

/// Red-black SOR sweeps of the five-point discretization. Each node moves by
/// relaxation * residual / diagonal with the residual taken from the current
/// neighbours. Boundary and axis values are held. Raises `divergence` if the
/// residual grows tenfold and `causal_limit` with the node if the 4-velocity
/// stops being timelike.
RelaxResult relax_elliptic(FieldState& s, Equation eq, int sweeps,
                           double relaxation, const GridPhysics& ph,
                           const Forcing& forcing = std::nullopt);

/// Defect correction with a sparse direct solve of the frozen-coefficient
/// linear operator; stops once the scaled residual is at most tol.
RelaxResult solve_elliptic_direct(FieldState& s, Equation eq, double tol,
                                  int max_iterations, const GridPhysics& ph,
                                  const Forcing& forcing = std::nullopt);

/// Gradient targets (kt1, kt3) of K at every node.
struct KTargets {
  Field2D kt1;
  Field2D kt3;
};

KTargets k_targets(const FieldState& s);

/// K(w, z) = K_O + int_0^z kt3(0, z') dz' + int_0^w kt1(w', z) dw' with the
/// composite trapezoid rule along the axis and then along each row.
Field2D integrate_K(const FieldState& s, double K_O = 0.0);
Field2D integrate_K(const KTargets& t, const Grid2D& g, double K_O = 0.0);

/// rho from the first integral: u = c^2 (const - G) clipped at 0. In the
/// corotating frame G = F'.
Field2D update_density(const FieldState& s, const GridPhysics& ph);
/// Log Lorentz factor at a node.
double node_G(const FieldState& s, const GridPhysics& ph, int i, int j);

enum class InnerSolver { direct, sor };
enum class ConstMode { central_density, fixed };
enum class KMode { integrate, fixed };
enum class BoundaryMode { asymptotic, fixed };

struct SolverConfig {
  Grid2D grid;
  Frame frame = Frame::unprimed;
  OmegaProfile omega;
  EosSpec eos;
  Constants k;

  double theta = 0.5;
  double relaxation = 1.6;
  double tol_outer = 1e-8;
  int max_outer = 500;
  InnerSolver inner = InnerSolver::direct;
  int sor_sweeps = 400;

  ConstMode const_mode = ConstMode::central_density;
  double central_density = 0.0;
  double first_integral_const = 0.0;
  /// Initial density ball radius; the first outer pass uses it in place of
  /// the first-integral update.
  double seed_radius = 1.0;

  KMode k_mode = KMode::integrate;
  BoundaryMode boundary = BoundaryMode::asymptotic;
  /// Differential rotation is refused unless this is set.
  bool allow_differential = false;

  void validate() const;
};

struct IterationRecord {
  double delta = 0.0;
  double rF = 0.0;
  double rA = 0.0;
  double rPi = 0.0;
  double k_mismatch = 0.0;
  double defect_L = 0.0;
};

struct SolveReport {
  int outer_iters = 0;
  std::vector<IterationRecord> history;
  bool converged = false;
  std::string message;
  std::optional<ErrorKind> failure;
  std::optional<Location> where;
};

struct SolveResult {
  FieldState state;
  SolveReport report;
};

/// Outer loop: (i) density from the first integral, (ii) F, A, Pi solves
/// with K frozen, (iii) K~ from the path integral, (iv) K <- (1 - theta) K +
/// theta K~. Stops when field changes, the F, A, Pi residuals and |K~ - K|
/// are all at most tol_outer. An invalid config throws; failures during the
/// iterations are reported, not thrown.
/// `initial` overrides the flat start (its boundary values are kept when the
/// boundary mode is fixed).
SolveResult fixed_point_solve(const SolverConfig& cfg,
                              const std::optional<FieldState>& initial = {});

struct EquationStats {
  std::string name;
  double max = 0.0;
  double l2 = 0.0;
  Location where;
};

struct ResidualReport {
  /// F, A, Pi, Kd, Ke in the state's frame.
  std::vector<EquationStats> reduced;
  /// Q00, Q02, Q22, Q11, Q33, Q13 of the rest-frame metric.
  std::vector<EquationStats> einstein;
  double max_reduced() const;
  double max_einstein() const;
};

/// Scaled residuals over interior nodes from central-difference jets.
ResidualReport grid_residual_report(const FieldState& s, const GridPhysics& ph,
                                    const Forcing& forcing = std::nullopt);

/// Mixed-partial defect of the K targets on nodes at least two cells from
/// the axis and the outer boundary: lhs = d_z kt1 - d_w kt3 and the rhs of
/// the defect identity. Other nodes hold 0.
struct GridDefect {
  Field2D lhs;
  Field2D rhs;
  double max_lhs = 0.0;
  double max_gap = 0.0;
  bool hypothesis_holds = true;
};

GridDefect grid_consistency_defect(const FieldState& s, const GridPhysics& ph);

/// Rest-frame potentials at a node (converted when the state is primed).
MetricJet rest_frame_jet(const FieldState& s, int i, int j,
                         const Constants& k);

}  // namespace astar
