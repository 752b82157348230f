#pragma once

#include <cstdint>
#include <random>

#include "astar/matter.hpp"
#include "astar/tensor_core.hpp"

namespace astar {

/// A pointwise state with a timelike 4-velocity and grad Pi != 0, both by a
/// margin.
struct AdmissibleState {
  MetricJet jet;
  FluidPoint fluid;
  /// Angular velocity with partials; constant unless requested otherwise.
  Jet Omega;
};

/// Draws independent values and partials for every potential. Fluid values
/// satisfy 0 <= P <= eps / 3; Omega keeps e^{2G} >= 0.2 e^{2F}.
AdmissibleState random_admissible_state(std::mt19937_64& rng,
                                        const Constants& k,
                                        bool variable_omega);

/// Smooth analytic metric field with random coefficients. Evaluation builds
/// exact jets from jet arithmetic, so it can feed both the closed forms and
/// the finite-difference oracles.
class SmoothField {
 public:
  explicit SmoothField(std::mt19937_64& rng);
  /// The fixture F = 0.1 e^{-w^2-z^2}, A = 0.05 w^2 z, Pi = w, K = 0.02 w z.
  static SmoothField fixture();

  MetricJet operator()(double w, double z) const;

 private:
  SmoothField() = default;
  double a0_ = 0, a1_ = 0, b1_ = 1, w0_ = 0, z0_ = 0, a2_ = 0, c1_ = 0, c2_ = 0;
  double e0_ = 0, e1_ = 0, e2_ = 0;
  double k0_ = 0, k1_ = 0, k2_ = 0;
  double p1_ = 0, p2_ = 0;
};

}  // namespace astar
