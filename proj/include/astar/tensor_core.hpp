#pragma once

#include <array>
#include <functional>

#include "astar/jet.hpp"

namespace astar {

/// Speed of light and gravitational constant. Geometrized units by default.
struct Constants {
  double c = 1.0;
  double G = 1.0;

  /// 8 pi G / c^4, the coupling in R_{mu nu} = coupling * S_{mu nu}.
  double coupling() const;
  void validate() const;
};

/// Minimum Pi accepted by point evaluators; the axis itself is handled by
/// parity in the grid code.
inline constexpr double kAxisEpsilon = 1e-10;

/// Lanczos-form metric potentials with their partials in (w, z):
/// ds^2 = e^{2F}(c dt + A dphi)^2 - e^{-2F}[e^{2K}(dw^2 + dz^2) + Pi^2 dphi^2].
struct MetricJet {
  Jet F;
  Jet A;
  Jet K;
  Jet Pi;
};

/// Lewis-form functions f, k, l, m with their partials:
/// ds^2 = f c^2 dt^2 - 2k c dt dphi - l dphi^2 - e^m (dw^2 + dz^2).
struct LewisState {
  Jet f;
  Jet k;
  Jet l;
  Jet m;
};

using Matrix4 = std::array<std::array<double, 4>, 4>;

struct MetricComponents {
  Matrix4 lower{};
  Matrix4 upper{};
};

/// Gamma^mu_{nu lambda} in coordinates x^0 = ct, x^1 = w, x^2 = phi, x^3 = z.
class Christoffel {
 public:
  double& operator()(int mu, int nu, int la) { return data_[idx(mu, nu, la)]; }
  double operator()(int mu, int nu, int la) const {
    return data_[idx(mu, nu, la)];
  }
  /// Writes both (nu, la) and (la, nu).
  void set_sym(int mu, int nu, int la, double v) {
    data_[idx(mu, nu, la)] = v;
    data_[idx(mu, la, nu)] = v;
  }

 private:
  static constexpr int idx(int mu, int nu, int la) {
    return 16 * mu + 4 * nu + la;
  }
  std::array<double, 64> data_{};
};

/// The six structurally nonzero Ricci components.
struct RicciComponents {
  double R00 = 0.0;
  double R02 = 0.0;
  double R22 = 0.0;
  double R11 = 0.0;
  double R33 = 0.0;
  double R13 = 0.0;
};

void validate(const MetricJet& jet);

LewisState lanczos_to_lewis(const MetricJet& jet);

/// Inverse of lanczos_to_lewis; Pi is recovered as sqrt(f l + k^2).
MetricJet lewis_to_lanczos(const LewisState& ls);

/// Pi = sqrt(f l + k^2) with partials.
Jet pi_from_lewis(const LewisState& ls);

MetricComponents metric_components(const MetricJet& jet);
MetricComponents metric_components(const LewisState& ls);

Christoffel christoffel_lanczos(const MetricJet& jet);
Christoffel christoffel_lewis(const LewisState& ls);

/// Sum over j of d_j f d_j l + (d_j k)^2.
double sigma(const LewisState& ls);
/// The same quantity from the Lanczos potentials:
/// sum over j of e^{4F}(d_j A)^2 - 4 (d_j F)^2 Pi^2 + 4 Pi d_j Pi d_j F.
double sigma_from_lanczos(const MetricJet& jet);

RicciComponents ricci_closed_form(const LewisState& ls);

/// Maps (w, z) to a metric; only the values of the returned jets are read.
using MetricSampler = std::function<MetricJet(double w, double z)>;

/// Full R_{mu nu} from R = dGamma - dGamma + Gamma Gamma - Gamma Gamma with
/// every metric derivative taken by second-order central differences.
Matrix4 ricci_brute_force_full(const MetricSampler& sampler, double w, double z,
                               double h);
RicciComponents ricci_brute_force(const MetricSampler& sampler, double w,
                                  double z, double h);
/// One Richardson step on the brute-force oracle: (4 R(h/2) - R(h)) / 3.
RicciComponents ricci_richardson(const MetricSampler& sampler, double w,
                                 double z, double h);

double max_abs_diff(const RicciComponents& a, const RicciComponents& b);

}  // namespace astar
