#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/parallel.hpp"
#include "speclab/spectra.hpp"
#include "speclab/zeta.hpp"

namespace speclab::zeta {

double log_det_fredholm(const std::vector<double>& eigenvalues, double extra_log) {
  double trace_norm = 0.0, acc = 0.0;
  for (double x : eigenvalues) {
    require(std::isfinite(x), "det_fredholm: non-finite eigenvalue");
    require(1.0 + x > 0.0, "det_fredholm: 1 + lambda must be positive for the log form");
    trace_norm += std::abs(x);
    acc += std::log1p(x);
  }
  require(std::isfinite(trace_norm), "det_fredholm: eigenvalues are not summable");
  return acc + extra_log;
}

double det_fredholm(const std::vector<double>& eigenvalues, double extra_log) {
  double trace_norm = 0.0, prod = 1.0;
  for (double x : eigenvalues) {
    require(std::isfinite(x), "det_fredholm: non-finite eigenvalue");
    trace_norm += std::abs(x);
    prod *= 1.0 + x;
  }
  require(std::isfinite(trace_norm), "det_fredholm: eigenvalues are not summable");
  return prod * std::exp(extra_log);
}

FactorizationReport factorization_check(const DiagonalPair& p) {
  FactorizationReport r;
  r.log_lhs = log_det_zeta(p.ak).log_det;
  r.log_rhs = log_det_zeta(p.a).log_det + p.log_det_fredholm + p.separate_log;
  r.residual = std::abs(std::expm1(r.log_rhs - r.log_lhs));
  return r;
}

DiagonalPair massless_to_massive_circle(double L, double m, long n_block) {
  require(m > 0.0, "massless_to_massive_circle: m must be positive");
  require(n_block >= 1, "massless_to_massive_circle: n_block must be positive");
  DiagonalPair p;
  p.label = "massless-to-massive circle";
  p.a = spectra::twisted_circle_spectrum({L, 0.0, 0.0}, n_block);
  p.ak = spectra::twisted_circle_spectrum({L, m, 0.0}, n_block);
  // K_n = m^2 / lambda_n = x / n^2 on the nonzero modes.
  const double x = std::pow(m * L / (2.0 * std::numbers::pi), 2);
  const double b = n_block + 1.0;
  require(x < b * b, "massless_to_massive_circle: block too small for the tail series");
  std::vector<double> k;
  for (long n = 1; n <= n_block; ++n) {
    k.push_back(x / (static_cast<double>(n) * n));
    k.push_back(x / (static_cast<double>(n) * n));
  }
  double tail = 0.0, xj = 1.0;
  for (int j = 1; j < 200; ++j) {
    xj *= x;
    const double term = ((j % 2) ? 2.0 : -2.0) * xj / j * numerics::lerch_sum(2.0 * j, b);
    tail += term;
    if (std::abs(term) < 1e-18) break;
  }
  p.log_det_fredholm = log_det_fredholm(k, tail);
  p.separate_log = std::log(m * m);
  return p;
}

DiagonalPair twist_shift(double L, double m, double theta, double theta2, long n_block) {
  require(n_block >= 8, "twist_shift: n_block must be at least 8");
  DiagonalPair p;
  p.label = "twist shift";
  p.a = spectra::twisted_circle_spectrum({L, m, theta}, n_block);
  p.ak = spectra::twisted_circle_spectrum({L, m, theta2}, n_block);
  auto lam = [&](long n, double th) {
    const double k = (2.0 * std::numbers::pi * n + th) / L;
    return k * k + m * m;
  };
  for (long n = -n_block; n <= n_block; ++n)
    require(lam(n, theta) > Spectrum::kKernelTol && lam(n, theta2) > Spectrum::kKernelTol,
            "twist_shift: both operators must be invertible");
  // K is only conditionally summable, so the symmetric partial sums are
  // extrapolated in 1/N.
  std::vector<std::pair<double, double>> samples;
  for (int j = 0; j < 5; ++j) {
    const long nn = n_block << j;
    const double s = par::sum(static_cast<std::size_t>(2 * nn + 1), [&](std::size_t i) {
      const long n = static_cast<long>(i) - nn;
      return std::log(lam(n, theta2) / lam(n, theta));
    });
    samples.emplace_back(1.0 / nn, s);
  }
  const numerics::ExtrapolationResult ex = numerics::richardson(samples, 1);
  p.log_det_fredholm = ex.value;
  return p;
}

}  // namespace speclab::zeta
