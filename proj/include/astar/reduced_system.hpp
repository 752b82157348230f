#pragma once

#include <array>
#include <functional>
#include <string>

#include "astar/matter.hpp"
#include "astar/tensor_core.hpp"

namespace astar {

/// Residuals (left side minus right side) of the reduced field equations for
/// F, A, Pi and of the two first-order equations for K, together with the
/// gradient targets (kt1, kt3) those two equations prescribe for K.
///
/// Each residual carries a scale: 1 + the sum of the magnitudes of its terms.
struct ReducedResiduals {
  double rF = 0.0;
  double rA = 0.0;
  double rPi = 0.0;
  double rKd = 0.0;
  double rKe = 0.0;
  double kt1 = 0.0;
  double kt3 = 0.0;

  double sF = 1.0;
  double sA = 1.0;
  double sPi = 1.0;
  double sKd = 1.0;
  double sKe = 1.0;

  /// Largest |r| / scale over the five equations.
  double max_scaled() const;
};

/// Right sides of the first-order K equations (the "d" and "e" forms).
struct KRightSides {
  double d = 0.0;
  double e = 0.0;
};

/// Recovers (d_1 K, d_3 K) from the right sides by solving
/// [Pi_1 -Pi_3; Pi_3 Pi_1] (K_1, K_3) = (d, e).
std::array<double, 2> k_gradient_targets(const KRightSides& rh, double Pi_w,
                                         double Pi_z);
/// Inverse of k_gradient_targets.
KRightSides k_right_sides_from_targets(double kt1, double kt3, double Pi_w,
                                       double Pi_z);

KRightSides k_right_sides(const MetricJet& jet);

ReducedResiduals reduced_residuals(const MetricJet& jet,
                                   const FluidPoint& fluid,
                                   const Constants& k);

/// Q_{mu nu} = R_{mu nu} - (8 pi G / c^4) S_{mu nu}.
struct EinsteinResiduals {
  double Q00 = 0.0;
  double Q02 = 0.0;
  double Q22 = 0.0;
  double Q11 = 0.0;
  double Q33 = 0.0;
  double Q13 = 0.0;

  /// 1 + |R| + coupling |S| per component.
  std::array<double, 6> scale{1, 1, 1, 1, 1, 1};

  std::array<double, 6> values() const { return {Q00, Q02, Q22, Q11, Q33, Q13}; }
  double max_scaled() const;
};

EinsteinResiduals einstein_residuals(const MetricJet& jet,
                                     const FluidPoint& fluid,
                                     const Constants& k);

using Matrix3 = std::array<std::array<double, 3>, 3>;

double determinant(const Matrix3& m);
std::array<double, 3> solve3(const Matrix3& m, const std::array<double, 3>& b);

/// Links (Q00, Q02, Q22) to the residuals of the F, A, Pi equations:
/// rows[i] . Q * row_scale[i] = residual[i].
struct EquivalenceMap {
  Matrix3 rows{};
  std::array<double, 3> row_scale{};
};

/// Unprimed map: rows (1, 0, 0), (-A, 1, 0), (l, -2k, -f) with row scales
/// (e^m/f, 2e^m/f, e^m/Pi); the row determinant is -f = -e^{2F}.
EquivalenceMap unprimed_equivalence_map(const MetricJet& jet);

struct EquivalenceReport {
  double determinant = 0.0;
  double expected_determinant = 0.0;
  /// |det - expected| / |expected|
  double determinant_error = 0.0;
  /// max_i |scale_i (M Q)_i - r_i| / (1 + |terms|)
  double forward_error = 0.0;
  /// max_i |Q_i - (M^{-1} (r / scale))_i| / (1 + |Q_i| + |R_i|)
  double inverse_error = 0.0;
};

EquivalenceReport equivalence_check(const MetricJet& jet,
                                    const FluidPoint& fluid,
                                    const Constants& k);

struct IdentityReport {
  /// |l S00 - 2k S02 - f S22 - 2 P Pi^2|, scaled.
  double stress_identity = 0.0;
  /// |(e^m / Pi)(l R00 - 2k R02 - f R22) - Laplacian(Pi)|, scaled.
  double ricci_identity = 0.0;
  /// Laplacian(Pi) - (16 pi G/c^4) e^m P Pi; harmonic when P = 0.
  double pi_equation = 0.0;
};

IdentityReport identity_suite(const MetricJet& jet, const FluidPoint& fluid,
                              const Constants& k);

using JetSampler = std::function<MetricJet(double w, double z)>;
using FluidSampler = std::function<FluidPoint(double w, double z)>;

/// Both sides of the mixed-partial defect identity for the K gradient
/// targets: lhs = d_z kt1 - d_w kt3 by central differences of sampled
/// targets, rhs = (16 pi G/c^4) e^m P Pi / |grad Pi|^2
///               * [(d_w K - kt1) Pi_z - (d_z K - kt3) Pi_w].
struct ConsistencyDefect {
  double lhs = 0.0;
  double rhs = 0.0;
  bool hypothesis_holds = true;
  std::string warning;
};

ConsistencyDefect consistency_defect(const JetSampler& jets,
                                     const FluidSampler& fluid,
                                     const Constants& k, double w, double z,
                                     double h);

/// |a - b| / (1 + sum |terms|).
double scaled_error(double a, double b, std::initializer_list<double> terms);

}  // namespace astar
