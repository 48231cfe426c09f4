#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/spectra.hpp"
#include "speclab/zeta.hpp"

namespace speclab::zeta {

namespace {

constexpr double kPi = std::numbers::pi;

// sum_{j in range} exp(-t (k j)^2)
double theta_sum(double t, double k, long lo, long hi) {
  return par::sum(static_cast<std::size_t>(hi - lo + 1), [&](std::size_t i) {
    const double x = k * (lo + static_cast<long>(i));
    return std::exp(-t * x * x);
  });
}

}  // namespace

double dn_mode_scalar(double mu, double L1) {
  require(mu > 0.0 && L1 > 0.0, "dn_mode_scalar: need mu > 0 and L1 > 0");
  return 2.0 * mu * std::tanh(0.5 * mu * L1);
}

BfkReport bfk_torus_check(double L1, double L2, double m, long cutoff) {
  require(m > 0.0, "bfk_torus_check: m must be positive (zero mode would enter the DN kernel)");
  require(L1 > 0.0 && L2 > 0.0, "bfk_torus_check: lengths must be positive");
  require(cutoff >= 64, "bfk_torus_check: cutoff must be at least 64");
  BfkReport r;
  r.L1 = L1;
  r.L2 = L2;
  r.m = m;
  r.cutoff = cutoff;
  const double m2 = m * m;
  const double k1 = 2.0 * kPi / L1, k2 = 2.0 * kPi / L2, kd = kPi / L1;

  // Torus: the 2D heat trace factorizes over the two circle directions.
  HeatModel torus;
  torus.trace = [=](double t) {
    return std::exp(-m2 * t) * theta_sum(t, k1, -cutoff, cutoff) * theta_sum(t, k2, -cutoff, cutoff);
  };
  torus.heat = {{L1 * L2 / (4.0 * kPi), -1.0, m2}};
  torus.ell = std::min(L1, L2);
  torus.gap = m2;
  torus.t_valid = 37.0 / (std::pow(2.0 * kPi * (cutoff + 1) / std::max(L1, L2), 2) + m2);
  const LogDet ld_t = log_det_mellin(torus);

  // Cylinder [0, L1] x circle(L2) with Dirichlet conditions at both ends.
  HeatModel cyl;
  cyl.trace = [=](double t) {
    return std::exp(-m2 * t) * theta_sum(t, kd, 1, cutoff) * theta_sum(t, k2, -cutoff, cutoff);
  };
  cyl.heat = {{L1 * L2 / (4.0 * kPi), -1.0, m2}, {-L2 / (2.0 * std::sqrt(4.0 * kPi)), -0.5, m2}};
  cyl.ell = std::min(2.0 * L1, L2);
  cyl.gap = kd * kd + m2;
  cyl.t_valid = 37.0 / (std::min(std::pow(kd * (cutoff + 1), 2), std::pow(k2 * (cutoff + 1), 2)) + m2);
  const LogDet ld_c = log_det_mellin(cyl);

  // DN: eigenvalues 2 mu_n tanh(mu_n L1/2) = 2 mu_n (1 - small). The 2 mu_n part
  // is (Delta_Sigma + m^2)^{1/2} scaled by 2 and goes through the exact circle zeta.
  const Spectrum a = spectra::twisted_circle_spectrum({L2, m, 0.0}, 16);
  const LogDet ld_a = log_det_zeta(a);
  double log_tanh = 0.0, log_one_minus = 0.0, log_one_minus_2 = 0.0;
  for (long n = -cutoff; n <= cutoff; ++n) {
    const double mu = std::sqrt(k2 * k2 * n * n + m2);
    log_tanh += std::log(std::tanh(0.5 * mu * L1));
    log_one_minus += 2.0 * std::log1p(-std::exp(-mu * L1));
    log_one_minus_2 += std::log1p(-std::exp(-2.0 * mu * L1));
  }
  const double mu_next = std::sqrt(k2 * k2 * (cutoff + 1.0) * (cutoff + 1.0) + m2);
  r.tail_bound = 8.0 * std::exp(-mu_next * L1) / (1.0 - std::exp(-k2 * L1));
  r.log_det_dn = std::log(2.0) * ld_a.zeta_at_zero + 0.5 * ld_a.log_det + log_tanh;

  // Mode-sum regularization: the divergent part of each per-mode log factor
  // is linear in mu_n; its zeta-regularized sum is L1 times the finite part of
  // zeta_A at -1/2 plus the pole correction.
  const Laurent lr = zeta_laurent(a, -0.5);
  const double w = lr.finite_part + lr.residue * (2.0 - 2.0 * std::log(2.0));
  r.log_det_torus_modes = L1 * w + log_one_minus;
  r.log_det_dirichlet_modes = L1 * w + log_one_minus_2 - 0.5 * ld_a.log_det;

  r.log_det_torus = ld_t.log_det;
  r.log_det_dirichlet = ld_c.log_det;
  r.lhs = r.log_det_torus;
  r.rhs = r.log_det_dirichlet + r.log_det_dn;
  r.constant_offset = r.lhs - r.rhs;
  r.residual = std::abs(r.constant_offset);
  r.error_estimate = ld_t.error_estimate + ld_c.error_estimate + r.tail_bound;
  return r;
}

}  // namespace speclab::zeta
