#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/covers.hpp"
#include "speclab/error.hpp"
#include "speclab/parallel.hpp"

namespace speclab::covers {

namespace {
constexpr double kPi = std::numbers::pi;
// Terms with exponent beyond this are below 1e-21 relative to the leading one.
constexpr double kCut = 50.0;
}  // namespace

double heat_trace_eigen_sum_serial(double L, int N, double t) {
  require(t > 0.0, "heat_trace_cover: t must be positive");
  const double k = 2.0 * kPi / (N * L);
  const long n_max = static_cast<long>(std::ceil(std::sqrt(kCut / t) / k)) + 1;
  double acc = 1.0;
  for (long n = n_max; n >= 1; --n) acc += 2.0 * std::exp(-t * k * k * n * n);
  return acc;
}

HeatTracePair heat_trace_cover(double L, int N, double t) {
  require(t > 0.0, "heat_trace_cover: t must be positive");
  require(L > 0.0 && N >= 1, "heat_trace_cover: need L > 0 and N >= 1");
  HeatTracePair r;
  const double k = 2.0 * kPi / (N * L);
  const long n_max = static_cast<long>(std::ceil(std::sqrt(kCut / t) / k)) + 1;
  r.eigen_sum = 1.0 + 2.0 * par::sum(static_cast<std::size_t>(n_max), [&](std::size_t i) {
                  const double x = k * static_cast<double>(i + 1);
                  return std::exp(-t * x * x);
                });
  // Deck translates by k N L, each contributing the line kernel integrated over one sheet.
  const double period = N * L;
  const long k_max = static_cast<long>(std::ceil(std::sqrt(4.0 * t * kCut) / period)) + 1;
  double images = 0.0;
  for (long j = k_max; j >= 1; --j) images += 2.0 * std::exp(-(j * period) * (j * period) / (4.0 * t));
  r.deck_sum = N * L / std::sqrt(4.0 * kPi * t) * (1.0 + images);
  r.difference = std::abs(r.eigen_sum - r.deck_sum);
  return r;
}

double heat_bound_constant(const Lambda0Curve& c) {
  require(c.p >= 1 && c.b > 0.0, "heat_bound_constant: curve has no valid (p, b)");
  const double e = 1.0 / (2.0 * c.p);
  return std::tgamma(e) / (c.p * std::pow(c.b, e));
}

HeatBoundReport small_eigen_heat_bound(const TwistedFamily& family, const Lambda0Curve& curve,
                                       const std::vector<double>& t_grid, const std::vector<int>& N_list) {
  require(!curve.flagged, "small_eigen_heat_bound: lambda_0 curve is flagged: " + curve.note);
  require(curve.eps0 > 0.0, "small_eigen_heat_bound: eps0 must be positive");
  double l1_floor = INFINITY;
  for (double v : curve.lambda1) l1_floor = std::min(l1_floor, v);
  require(curve.eps0 < l1_floor, "small_eigen_heat_bound: eps0 is not below the lambda_1 floor");
  HeatBoundReport r;
  r.c4 = heat_bound_constant(curve);
  const double e = 1.0 / (2.0 * curve.p);
  for (int N : N_list) {
    require(N >= 1, "small_eigen_heat_bound: N must be positive");
    std::vector<double> small;
    for (int p = 0; p < N; ++p) {
      const Eigen::VectorXd ev = family(2.0 * kPi * p / N);
      for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > Spectrum::kKernelTol && ev(i) < curve.eps0) small.push_back(ev(i));
    }
    for (double t : t_grid) {
      double lhs = 0.0;
      for (double l : small) lhs += std::exp(-t * l);
      lhs /= N;
      const double gap = lhs - r.c4 * std::pow(t, -e);
      if (gap > 0.0) ++r.violations;
      if (gap > r.max_violation) {
        r.max_violation = gap;
        r.worst_t = t;
        r.worst_N = N;
      }
    }
  }
  return r;
}

double eigencount_check(const Spectrum& sp, double vol, const std::vector<double>& lambda_grid, int d) {
  require(vol > 0.0 && d >= 1, "eigencount_check: need vol > 0 and d >= 1");
  require(!lambda_grid.empty(), "eigencount_check: empty Lambda grid");
  double worst = 0.0;
  for (double lam : lambda_grid) {
    require(lam >= 1.0, "eigencount_check: Lambda must be at least 1");
    require(sp.is_finite() || sp.truncation.complete_below > lam,
            "eigencount_check: stored spectrum is incomplete below Lambda");
    const auto count = std::upper_bound(sp.eigenvalues.begin(), sp.eigenvalues.end(), lam) - sp.eigenvalues.begin();
    worst = std::max(worst, static_cast<double>(count) / (vol * std::pow(lam, 0.5 * d)));
  }
  return worst;
}

double flat_weyl_constant(int d) {
  require(d >= 1, "flat_weyl_constant: d must be positive");
  const double omega = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return std::pow(3.0, d) * omega / std::pow(2.0 * kPi, d);
}

}  // namespace speclab::covers
