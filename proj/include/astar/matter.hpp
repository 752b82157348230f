#pragma once

#include <array>
#include <vector>

#include "astar/tensor_core.hpp"

namespace astar {

enum class EosKind { barotropic, dust };

/// P = Acoef rho^gamma (1 + Upsilon(Acoef rho^{gamma-1} / c^2)) with
/// Upsilon(x) = sum_i upsilon[i] x^{i+1}, or dust (P = 0).
struct EosSpec {
  EosKind kind = EosKind::barotropic;
  double gamma = 5.0 / 3.0;
  double Acoef = 1.0;
  std::vector<double> upsilon;

  void validate() const;
};

struct PressureValue {
  double P = 0.0;
  double dP_drho = 0.0;
};

PressureValue eos_pressure(double rho, const EosSpec& eos, const Constants& k);

/// Relativistic enthalpy u = int_0^rho dP / (s + P(s)/c^2) by adaptive
/// Gauss-Kronrod quadrature in the variable x = Acoef s^{gamma-1} / c^2.
double enthalpy_u(double rho, const EosSpec& eos, const Constants& k);

/// Inverse of enthalpy_u by bracketed root finding.
double rho_from_u(double u, const EosSpec& eos, const Constants& k);

/// Largest x = Acoef rho^{gamma-1}/c^2 for which 0 < dP/drho < c^2 holds on
/// [0, x]; infinity for dust.
double causal_x_limit(const EosSpec& eos);

/// Tabulated enthalpy for solver hot loops. Immutable after construction.
///
/// The cumulative integral is stored on a uniform x grid up to the causal
/// limit; in-between values add an 8-point Gauss-Legendre piece and the
/// inverse is a safeguarded Newton iteration.
class EnthalpyTable {
 public:
  EnthalpyTable(const EosSpec& eos, const Constants& k, int nodes = 2048);

  double u_of_rho(double rho) const;
  double rho_of_u(double u) const;
  double u_max() const { return cum_.back(); }

 private:
  double u_of_x(double x) const;
  double x_of_rho(double rho) const;
  double rho_of_x(double x) const;

  EosSpec eos_;
  Constants k_;
  double x_max_ = 0.0;
  double dx_ = 0.0;
  std::vector<double> cum_;
};

struct FluidPoint {
  double rho = 0.0;
  double P = 0.0;
  double eps = 0.0;
  double u = 0.0;
  double Omega = 0.0;
  double dOmega_w = 0.0;
  double dOmega_z = 0.0;
};

/// Builds a consistent fluid point from the density (eps = c^2 rho).
FluidPoint make_fluid(double rho, double Omega, const EosSpec& eos,
                      const Constants& k);

/// e^{2G} = e^{2F}(1 + Omega A/c)^2 - e^{-2F} Omega^2 Pi^2 / c^2.
double lorentz_e2G(const MetricJet& jet, double Omega, const Constants& k);
double lorentz_G(const MetricJet& jet, double Omega, const Constants& k);

struct FourVelocity {
  std::array<double, 4> upper{};
  std::array<double, 4> lower{};
  double G = 0.0;
};

FourVelocity four_velocity(const MetricJet& jet, double Omega,
                           const Constants& k);

/// U^0 U_2 = e^{2F-2G}(A(1 + Omega A/c) - e^{-4F} Omega Pi^2 / c).
double u0_u2(const MetricJet& jet, double Omega, const Constants& k);

struct StressEnergy {
  Matrix4 T_upper{};
  Matrix4 T_lower{};
  Matrix4 S_lower{};
  double trace = 0.0;
};

/// T^{mu nu}, T_{mu nu} from the fluid, S_{mu nu} from its closed form in the
/// Lewis functions, and the trace g_{ab} T^{ab}.
StressEnergy stress_energy(const MetricJet& jet, const FluidPoint& fluid,
                           const Constants& k);

struct FluidGradients {
  double dP_w = 0.0, dP_z = 0.0;
  double dG_w = 0.0, dG_z = 0.0;
  double dOmega_w = 0.0, dOmega_z = 0.0;
};

struct EulerResidual {
  double r1 = 0.0;
  double r3 = 0.0;
};

/// d_j P + (eps + P) d_j G - (eps + P) U^0 U_2 d_j Omega / c, j = 1, 3.
EulerResidual euler_residual(const MetricJet& jet, const FluidPoint& fluid,
                             const FluidGradients& grad, const Constants& k);

/// u/c^2 + G - const_value; meaningful where rho > 0.
double first_integral_residual(const FluidPoint& fluid, double G,
                               double const_value, const Constants& k);

}  // namespace astar
