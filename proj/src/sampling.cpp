#include "astar/sampling.hpp"

#include <cmath>

namespace astar {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Jet random_jet(std::mt19937_64& rng, double lo, double hi, double dscale) {
  Jet j;
  j.val = uniform(rng, lo, hi);
  j.w = uniform(rng, -dscale, dscale);
  j.z = uniform(rng, -dscale, dscale);
  j.ww = uniform(rng, -dscale, dscale);
  j.wz = uniform(rng, -dscale, dscale);
  j.zz = uniform(rng, -dscale, dscale);
  return j;
}

}  // namespace

AdmissibleState random_admissible_state(std::mt19937_64& rng,
                                        const Constants& k,
                                        bool variable_omega) {
  AdmissibleState s;
  s.jet.F = random_jet(rng, -0.5, 0.5, 1.0);
  s.jet.A = random_jet(rng, -0.5, 0.5, 1.0);
  s.jet.K = random_jet(rng, -0.5, 0.5, 1.0);
  s.jet.Pi = random_jet(rng, 0.5, 2.0, 1.0);
  while (s.jet.Pi.grad_sq() < 0.01) {
    s.jet.Pi.w = uniform(rng, -1.0, 1.0);
    s.jet.Pi.z = uniform(rng, -1.0, 1.0);
  }

  const double e2F = std::exp(2.0 * s.jet.F.val);
  for (;;) {
    const double om = uniform(rng, -1.0, 1.0);
    const double b = 1.0 + om * s.jet.A.val;
    const double e2G = e2F * b * b - om * om * s.jet.Pi.val * s.jet.Pi.val / e2F;
    if (e2G >= 0.2 * e2F) {
      s.Omega = Jet::constant(om * k.c);
      break;
    }
  }
  if (variable_omega) {
    s.Omega.w = uniform(rng, -0.3, 0.3) * k.c;
    s.Omega.z = uniform(rng, -0.3, 0.3) * k.c;
    s.Omega.ww = uniform(rng, -0.3, 0.3) * k.c;
    s.Omega.wz = uniform(rng, -0.3, 0.3) * k.c;
    s.Omega.zz = uniform(rng, -0.3, 0.3) * k.c;
  }

  s.fluid.rho = uniform(rng, 0.0, 0.5);
  s.fluid.eps = k.c * k.c * s.fluid.rho;
  s.fluid.P = uniform(rng, 0.0, 1.0 / 3.0) * s.fluid.eps;
  s.fluid.Omega = s.Omega.val;
  s.fluid.dOmega_w = s.Omega.w;
  s.fluid.dOmega_z = s.Omega.z;
  return s;
}

SmoothField::SmoothField(std::mt19937_64& rng) {
  a0_ = uniform(rng, -0.2, 0.2);
  a1_ = uniform(rng, -0.3, 0.3);
  b1_ = uniform(rng, 0.5, 1.5);
  w0_ = uniform(rng, 0.5, 1.5);
  z0_ = uniform(rng, -0.5, 0.5);
  a2_ = uniform(rng, -0.1, 0.1);
  c1_ = uniform(rng, -2.0, 2.0);
  c2_ = uniform(rng, -2.0, 2.0);
  e0_ = uniform(rng, -0.2, 0.2);
  e1_ = uniform(rng, -0.5, 0.5);
  e2_ = uniform(rng, -0.3, 0.3);
  k0_ = uniform(rng, -0.2, 0.2);
  k1_ = uniform(rng, -0.2, 0.2);
  k2_ = uniform(rng, -0.1, 0.1);
  p1_ = uniform(rng, -0.2, 0.2);
  p2_ = uniform(rng, -0.1, 0.1);
}

SmoothField SmoothField::fixture() {
  SmoothField f;
  f.a1_ = 0.1;
  f.b1_ = 1.0;
  f.e0_ = 0.05;
  f.k0_ = 0.02;
  return f;
}

MetricJet SmoothField::operator()(double w, double z) const {
  const Jet W = Jet::coord_w(w), Z = Jet::coord_z(z);
  const Jet dw = W - w0_, dz = Z - z0_;
  MetricJet m;
  m.F = a0_ + a1_ * exp(-b1_ * (dw * dw + dz * dz)) + a2_ * sin(c1_ * W + c2_ * Z);
  m.A = e0_ * W * W * Z + e0_ * W * W * (e1_ + e2_ * W);
  m.K = k0_ * W * Z + k1_ * Z * Z + k2_ * cos(W);
  m.Pi = W * (1.0 + p1_ * Z + p2_ * W * W);
  return m;
}

}  // namespace astar
