#include "astar/matter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "astar/errors.hpp"

namespace astar {

namespace {

struct UpsilonValue {
  double v = 0.0;   // Upsilon(x)
  double dv = 0.0;  // Upsilon'(x)
};

UpsilonValue upsilon(const std::vector<double>& a, double x) {
  // Upsilon(x) = sum_i a[i] x^{i+1}; Horner on the coefficient list.
  UpsilonValue r;
  for (std::size_t i = a.size(); i-- > 0;) {
    r.dv = r.dv * x + r.v;
    r.v = r.v * x + a[i];
  }
  r.dv = r.dv * x + r.v;
  r.v *= x;
  return r;
}

// gamma(1 + Upsilon) + (gamma - 1) x Upsilon'; dP/drho = c^2 x * stiffness.
double stiffness(const EosSpec& eos, double x) {
  const UpsilonValue y = upsilon(eos.upsilon, x);
  return eos.gamma * (1.0 + y.v) + (eos.gamma - 1.0) * x * y.dv;
}

// du/dx in units of c^2.
double enthalpy_integrand(const EosSpec& eos, double x) {
  const UpsilonValue y = upsilon(eos.upsilon, x);
  return stiffness(eos, x) / ((eos.gamma - 1.0) * (1.0 + x * (1.0 + y.v)));
}

double x_of(double rho, const EosSpec& eos, const Constants& k) {
  return eos.Acoef * std::pow(rho, eos.gamma - 1.0) / (k.c * k.c);
}

double rho_of(double x, const EosSpec& eos, const Constants& k) {
  return std::pow(x * k.c * k.c / eos.Acoef, 1.0 / (eos.gamma - 1.0));
}

constexpr double kXCap = 10.0;

}  // namespace

void EosSpec::validate() const {
  if (kind == EosKind::dust) return;
  if (!(gamma > 1.0 && gamma < 2.0)) {
    fail(ErrorKind::config, "eos.gamma must satisfy 1 < gamma < 2");
  }
  if (!(Acoef > 0.0) || !std::isfinite(Acoef)) {
    fail(ErrorKind::config, "eos.A must be positive");
  }
  for (double a : upsilon) {
    if (!std::isfinite(a)) {
      fail(ErrorKind::config, "eos.upsilon_coeffs must be finite");
    }
  }
}

double causal_x_limit(const EosSpec& eos) {
  if (eos.kind == EosKind::dust) return std::numeric_limits<double>::infinity();
  auto admissible = [&](double x) {
    const double s = stiffness(eos, x);
    return s > 0.0 && x * s < 1.0;
  };
  const double step = 1e-3 / eos.gamma;
  double lo = 0.0;
  double hi = step;
  while (hi <= kXCap && admissible(hi)) {
    lo = hi;
    hi += step;
  }
  if (hi > kXCap) return kXCap;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return lo;
}

PressureValue eos_pressure(double rho, const EosSpec& eos, const Constants& k) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    fail(ErrorKind::eos_range, "density must be finite and non-negative");
  }
  if (eos.kind == EosKind::dust || rho == 0.0) return {};
  const double x = x_of(rho, eos, k);
  const UpsilonValue y = upsilon(eos.upsilon, x);
  PressureValue p;
  p.P = eos.Acoef * std::pow(rho, eos.gamma) * (1.0 + y.v);
  p.dP_drho = k.c * k.c * x * stiffness(eos, x);
  if (!(p.dP_drho > 0.0) || !(p.dP_drho < k.c * k.c)) {
    std::ostringstream os;
    os << "dP/drho = " << p.dP_drho << " outside (0, c^2) at rho = " << rho;
    fail(ErrorKind::causality_violation, os.str());
  }
  return p;
}

double enthalpy_u(double rho, const EosSpec& eos, const Constants& k) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    fail(ErrorKind::eos_range, "density must be finite and non-negative");
  }
  if (eos.kind == EosKind::dust || rho == 0.0) return 0.0;
  const double x = x_of(rho, eos, k);
  if (x >= causal_x_limit(eos)) {
    std::ostringstream os;
    os << "rho = " << rho << " lies beyond the causal limit of the EOS";
    fail(ErrorKind::causality_violation, os.str());
  }
  double err = 0.0;
  // Integrate over s = x t, t in [0, 1], so the error floor is relative.
  auto g = [&](double t) { return enthalpy_integrand(eos, x * t); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double I = GK::integrate(g, 0.0, 1.0, 15, 1e-14, &err);
  if (err > 1e-10 * std::abs(I)) {
    std::ostringstream os;
    os << "enthalpy quadrature did not converge: rho = " << rho
       << ", estimate = " << I << ", error = " << err;
    fail(ErrorKind::numeric, os.str());
  }
  return k.c * k.c * x * I;
}

double rho_from_u(double u, const EosSpec& eos, const Constants& k) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    fail(ErrorKind::eos_range, "enthalpy must be finite and non-negative");
  }
  if (u == 0.0) return 0.0;
  if (eos.kind == EosKind::dust) {
    fail(ErrorKind::eos_range, "dust has zero enthalpy at every density");
  }
  const double xc = causal_x_limit(eos);
  const double umax = enthalpy_u(rho_of(xc * (1.0 - 1e-14), eos, k), eos, k);
  if (u > umax) {
    std::ostringstream os;
    os << "u = " << u << " exceeds the causal maximum " << umax;
    fail(ErrorKind::eos_range, os.str());
  }
  auto f = [&](double x) {
    return enthalpy_u(rho_of(x, eos, k), eos, k) - u;
  };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, 0.0, xc * (1.0 - 1e-14), -u, umax - u,
      boost::math::tools::eps_tolerance<double>(52), iters);
  return rho_of(0.5 * (r.first + r.second), eos, k);
}

EnthalpyTable::EnthalpyTable(const EosSpec& eos, const Constants& k, int nodes)
    : eos_(eos), k_(k) {
  if (eos_.kind == EosKind::dust) {
    cum_ = {0.0};
    return;
  }
  x_max_ = causal_x_limit(eos_) * (1.0 - 1e-12);
  dx_ = x_max_ / nodes;
  cum_.assign(nodes + 1, 0.0);
  auto g = [&](double s) { return enthalpy_integrand(eos_, s); };
  using GL = boost::math::quadrature::gauss<double, 8>;
  for (int i = 0; i < nodes; ++i) {
    cum_[i + 1] = cum_[i] + k_.c * k_.c * GL::integrate(g, i * dx_, (i + 1) * dx_);
  }
}

double EnthalpyTable::x_of_rho(double rho) const { return x_of(rho, eos_, k_); }
double EnthalpyTable::rho_of_x(double x) const { return rho_of(x, eos_, k_); }

double EnthalpyTable::u_of_x(double x) const {
  const int n = static_cast<int>(cum_.size()) - 1;
  const int i = std::clamp(static_cast<int>(x / dx_), 0, n - 1);
  auto g = [&](double s) { return enthalpy_integrand(eos_, s); };
  using GL = boost::math::quadrature::gauss<double, 8>;
  return cum_[i] + k_.c * k_.c * GL::integrate(g, i * dx_, x);
}

double EnthalpyTable::u_of_rho(double rho) const {
  if (eos_.kind == EosKind::dust || rho <= 0.0) return 0.0;
  const double x = x_of_rho(rho);
  if (x > x_max_) {
    fail(ErrorKind::causality_violation, "density beyond the causal limit");
  }
  return u_of_x(x);
}

double EnthalpyTable::rho_of_u(double u) const {
  if (u <= 0.0) return 0.0;
  if (eos_.kind == EosKind::dust) {
    fail(ErrorKind::eos_range, "dust has zero enthalpy at every density");
  }
  if (u > cum_.back()) {
    std::ostringstream os;
    os << "u = " << u << " exceeds the causal maximum " << cum_.back();
    fail(ErrorKind::eos_range, os.str());
  }
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const int i = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0,
                           static_cast<int>(cum_.size()) - 2);
  const double lo = i * dx_, hi = (i + 1) * dx_;
  double x = lo + dx_ * (u - cum_[i]) / (cum_[i + 1] - cum_[i]);
  for (int it2 = 0; it2 < 8; ++it2) {
    const double r = u_of_x(x) - u;
    const double d = k_.c * k_.c * enthalpy_integrand(eos_, x);
    const double xn = std::clamp(x - r / d, lo, hi);
    const bool done = std::abs(xn - x) <= 1e-16 * hi;
    x = xn;
    if (done) break;
  }
  return rho_of_x(x);
}

FluidPoint make_fluid(double rho, double Omega, const EosSpec& eos,
                      const Constants& k) {
  FluidPoint p;
  p.rho = rho;
  p.P = eos_pressure(rho, eos, k).P;
  p.eps = k.c * k.c * rho;
  p.u = enthalpy_u(rho, eos, k);
  p.Omega = Omega;
  return p;
}

double lorentz_e2G(const MetricJet& jet, double Omega, const Constants& k) {
  const double om = Omega / k.c;
  const double e2F = std::exp(2.0 * jet.F.val);
  const double b = 1.0 + om * jet.A.val;
  return e2F * b * b - om * om * jet.Pi.val * jet.Pi.val / e2F;
}

double lorentz_G(const MetricJet& jet, double Omega, const Constants& k) {
  const double e2G = lorentz_e2G(jet, Omega, k);
  if (!(e2G > 0.0)) {
    std::ostringstream os;
    os << "4-velocity is not timelike: e^{2G} = " << e2G
       << " for Omega = " << Omega << ", Pi = " << jet.Pi.val;
    fail(ErrorKind::causal_limit, os.str());
  }
  return 0.5 * std::log(e2G);
}

FourVelocity four_velocity(const MetricJet& jet, double Omega,
                           const Constants& k) {
  const double om = Omega / k.c;
  FourVelocity U;
  U.G = lorentz_G(jet, Omega, k);
  const double eG = std::exp(-U.G);
  const double e2F = std::exp(2.0 * jet.F.val);
  const double A = jet.A.val;
  const double Pi2 = jet.Pi.val * jet.Pi.val;
  U.upper = {eG, 0.0, eG * om, 0.0};
  U.lower = {e2F * eG * (1.0 + om * A), 0.0,
             e2F * eG * (A * (1.0 + om * A) - om * Pi2 / (e2F * e2F)), 0.0};
  return U;
}

double u0_u2(const MetricJet& jet, double Omega, const Constants& k) {
  const FourVelocity U = four_velocity(jet, Omega, k);
  return U.upper[0] * U.lower[2];
}

StressEnergy stress_energy(const MetricJet& jet, const FluidPoint& fluid,
                           const Constants& k) {
  const FourVelocity U = four_velocity(jet, fluid.Omega, k);
  const MetricComponents g = metric_components(jet);
  const double eP = fluid.eps + fluid.P;
  StressEnergy out;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      out.T_upper[a][b] = eP * U.upper[a] * U.upper[b] - fluid.P * g.upper[a][b];
      out.T_lower[a][b] = eP * U.lower[a] * U.lower[b] - fluid.P * g.lower[a][b];
    }
  }
  double tr = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) tr += g.lower[a][b] * out.T_upper[a][b];
  }
  out.trace = tr;

  const double om = fluid.Omega / k.c;
  const double f = std::exp(2.0 * jet.F.val);
  const double kk = -f * jet.A.val;
  const double Pi2 = jet.Pi.val * jet.Pi.val;
  const double l = Pi2 / f - f * jet.A.val * jet.A.val;
  const double em = std::exp(2.0 * (jet.K.val - jet.F.val));
  const double h = 0.5 * eP * std::exp(-2.0 * U.G);
  const double P = fluid.P;
  Matrix4& S = out.S_lower;
  S[0][0] = h * ((f - om * kk) * (f - om * kk) + om * om * Pi2) + P * f;
  S[0][2] = S[2][0] =
      h * (-kk * f - 2.0 * om * f * l + om * om * kk * l) - P * kk;
  S[2][2] = h * (Pi2 + (kk + om * l) * (kk + om * l)) - P * l;
  S[1][1] = S[3][3] = 0.5 * em * (fluid.eps - P);
  return out;
}

EulerResidual euler_residual(const MetricJet& jet, const FluidPoint& fluid,
                             const FluidGradients& grad, const Constants& k) {
  const double eP = fluid.eps + fluid.P;
  if (eP == 0.0) return {grad.dP_w, grad.dP_z};
  const double uu = u0_u2(jet, fluid.Omega, k);
  return {grad.dP_w + eP * grad.dG_w - eP * uu * grad.dOmega_w / k.c,
          grad.dP_z + eP * grad.dG_z - eP * uu * grad.dOmega_z / k.c};
}

double first_integral_residual(const FluidPoint& fluid, double G,
                               double const_value, const Constants& k) {
  return fluid.u / (k.c * k.c) + G - const_value;
}

}  // namespace astar
