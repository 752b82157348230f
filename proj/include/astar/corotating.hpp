#pragma once

#include <array>
#include <string>

#include "astar/matter.hpp"
#include "astar/reduced_system.hpp"
#include "astar/tensor_core.hpp"

namespace astar {

/// Corotating potentials. With w = Omega/c:
/// f' = f - 2 w k - w^2 l, k' = k + w l, l' = l, m' = m,
/// e^{2F'} = f', A' = -k'/f', K' = m/2 + F', Pi shared.
struct PrimedState {
  Jet Fp;
  Jet Ap;
  Jet Kp;
  Jet Pi;
  Jet fp;
  Jet kp;
  Jet lp;
  Jet mp;

  /// (F', A', K', Pi) packaged as a Lanczos-form jet.
  MetricJet potentials() const { return MetricJet{Fp, Ap, Kp, Pi}; }
};

/// Omega is a jet so that its partials enter the primed partials.
PrimedState to_primed(const MetricJet& jet, const Jet& Omega,
                      const Constants& k);
MetricJet from_primed(const PrimedState& primed, const Jet& Omega,
                      const Constants& k);
/// Builds the primed Lewis functions from primed potentials.
PrimedState primed_from_potentials(const MetricJet& potentials);

/// Extra terms that appear in the primed equations when Omega varies.
struct CorrectionTerms {
  double D1 = 0.0;
  double D2 = 0.0;
  double W1_1 = 0.0;
  double W1_3 = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  /// Sum over j of d_j f' d_j l' + (d_j k')^2.
  double sigma_p = 0.0;
};

CorrectionTerms correction_terms(const PrimedState& primed, const Jet& Omega,
                                 const Constants& k);

/// Residuals of the primed system including the variable-Omega corrections.
ReducedResiduals primed_reduced_residuals(const PrimedState& primed,
                                          const FluidPoint& fluid,
                                          const Jet& Omega,
                                          const Constants& k);

/// Residuals of the primed system for constant Omega (no correction terms).
ReducedResiduals ceq_residuals(const PrimedState& primed,
                               const FluidPoint& fluid, const Constants& k);

/// Rows (l, -2k, -f), (k + w l, f + w^2 l, w (f - w k)), (1, 2w, w^2) acting
/// on (Q00, Q02, Q22); row scales (e^m/Pi, 2e^m/f'^2, e^m/f') map them to
/// (rPi, rA', rF'). The row determinant equals f'^2 = e^{4F'}.
EquivalenceMap primed_equivalence_map(const MetricJet& jet, double Omega,
                                      const Constants& k);

EquivalenceReport primed_equivalence_check(const MetricJet& jet,
                                           const FluidPoint& fluid,
                                           const Jet& Omega,
                                           const Constants& k);

/// Defect identity for the primed K gradient targets (constant Omega only).
ConsistencyDefect primed_consistency_defect(const JetSampler& primed_potentials,
                                            const FluidSampler& fluid,
                                            const Constants& k, double w,
                                            double z, double h);

/// Checks of the corotating-coordinate reading of the primed potentials.
struct TransformReport {
  double Fp = 0.0;
  double Ap = 0.0;
  double Kp = 0.0;
  /// e^{2F'}A'^2 - e^{-2F'}Pi^2 against e^{2F}A^2 - e^{-2F}Pi^2.
  double square_identity = 0.0;
  /// e^{2F} recomputed from the primed potentials.
  double inverse_identity = 0.0;
  /// (1 - A'w) e^{2F'} against (1 + Aw) e^{2F}.
  double mixed_identity = 0.0;
  /// (F', A', K') against the Lewis-route primed variables.
  double lewis_route = 0.0;
  /// |G - F'|.
  double g_minus_fp = 0.0;
  /// Corotating 4-velocity components.
  std::array<double, 4> U_corotating{};
  /// |U^{0'} - e^{-G}| + |U^{2'}| + |g'_{00}(U^{0'})^2 - 1|.
  double velocity_error = 0.0;

  double max_error() const;
};

TransformReport verify_transform(const MetricJet& jet, double Omega,
                                 const Constants& k);
/// Rejects an Omega with nonzero partials.
TransformReport verify_transform(const MetricJet& jet, const Jet& Omega,
                                 const Constants& k);

/// ds^2 in the original coordinates minus the primed Lanczos form when the
/// coordinates (t, w, phi - Omega t, z) are used with a position-dependent
/// Omega. The displacement is (dx^0 = c dt, dw, dphi', dz).
struct LineElementDefect {
  double difference = 0.0;
  /// g22 d^2 + 2 d (g02 dx^0 + g22 (dphi' + w dx^0)), d = t d_j Omega dx^j.
  double exact_extra = 0.0;
  /// g22 sum_j [t^2 (d_j Omega dx^j)^2 + 2 t Omega d_j Omega dt dx^j
  ///            + 2 t d_j Omega dphi' dx^j].
  double diagonal_extra = 0.0;
};

LineElementDefect corotating_line_element(const MetricJet& jet,
                                          const Jet& Omega, double t,
                                          const std::array<double, 4>& dx,
                                          const Constants& k);

}  // namespace astar
