#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "astar/sampling.hpp"

namespace astar {

struct IdentityCheck {
  std::string name;
  /// Largest scaled error over all samples.
  double max_error = 0.0;
};

struct IdentityFailure {
  std::string identity;
  int sample = 0;
  double error = 0.0;
  /// The state that failed, for replay.
  AdmissibleState state;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  int points = 0;
  double tol = 0.0;
  std::vector<IdentityCheck> checks;
  std::optional<IdentityFailure> first_failure;
  bool passed() const { return !first_failure.has_value(); }
};

/// Runs every pointwise identity on `points` random admissible states:
/// Pi^2 = f l + k^2 in both frames, l' from the primed potentials, the two
/// Sigma routes, the stress and Ricci identities behind the Pi equation,
/// the trace T = eps - 3P by two routes, the two Christoffel routes, the
/// corotating square and mixed identities and Sigma = Sigma' + W1 for a
/// varying Omega.
SuiteReport run_identity_suite(std::uint64_t seed, int points, double tol,
                                   const Constants& k);

struct RicciRow {
  double h = 0.0;
  /// Largest |closed form - brute force| over fields and components.
  double max_discrepancy = 0.0;
};

struct RicciStudy {
  std::vector<RicciRow> rows;
  /// Smallest per-field order log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
  double min_order = 0.0;
  int fields = 0;
};

/// Closed-form Ricci against the finite-difference oracle on random smooth
/// fields, one interior point per field. `h` must be strictly decreasing.
RicciStudy ricci_convergence(const std::vector<double>& h, int fields,
                             std::uint64_t seed);

/// Same table for a single sampler at one point.
RicciStudy ricci_convergence(const std::vector<double>& h,
                             const MetricSampler& field, double w, double z);

}  // namespace astar
