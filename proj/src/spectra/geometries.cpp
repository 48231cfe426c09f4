#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/spectra.hpp"

namespace speclab::spectra {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Spectrum twisted_circle_spectrum(const TwistedCircle& c, long n_max) {
  require(c.L > 0.0, "twisted_circle_spectrum: L must be positive");
  require(c.m >= 0.0, "twisted_circle_spectrum: mass must be nonnegative");
  require(n_max >= 1, "twisted_circle_spectrum: n_max must be at least 1");
  Spectrum sp;
  const double m2 = c.m * c.m;
  for (long n = -n_max; n <= n_max; ++n) {
    const double k = (kTwoPi * n + c.theta) / c.L;
    sp.eigenvalues.push_back(k * k + m2);
  }
  // Reduce the twist to [0, 2 pi); the spectrum only depends on theta mod 2 pi.
  double tr = std::fmod(c.theta, kTwoPi);
  if (tr < 0) tr += kTwoPi;
  const double frac = tr / kTwoPi;
  TailLaw tail;
  tail.heat.push_back({c.L / std::sqrt(4.0 * std::numbers::pi), -0.5, m2});
  tail.ell = c.L;
  const double cc = kTwoPi / c.L;
  if (frac < 1e-15 || frac > 1.0 - 1e-15) {
    tail.isolated.push_back(m2);
    tail.branches.push_back({cc, 1.0, m2, 2});
  } else {
    tail.branches.push_back({cc, frac, m2, 1});
    tail.branches.push_back({cc, 1.0 - frac, m2, 1});
  }
  sp.tail = tail;
  // Smallest omitted value comes from n = +-(n_max + 1).
  const double kp = (kTwoPi * (n_max + 1) + c.theta) / c.L;
  const double km = (-kTwoPi * (n_max + 1) + c.theta) / c.L;
  sp.truncation = {n_max, std::min(kp * kp, km * km) + m2, "|n| <= n_max"};
  sp.normalize();
  return sp;
}

Spectrum torus_spectrum(double L1, double L2, double m, long n_max) {
  require(L1 > 0.0 && L2 > 0.0, "torus_spectrum: lengths must be positive");
  require(m >= 0.0, "torus_spectrum: mass must be nonnegative");
  require(n_max >= 1, "torus_spectrum: n_max must be at least 1");
  Spectrum sp;
  const double m2 = m * m;
  sp.eigenvalues.reserve((2 * n_max + 1) * (2 * n_max + 1));
  for (long j = -n_max; j <= n_max; ++j) {
    const double a = kTwoPi * j / L1;
    for (long k = -n_max; k <= n_max; ++k) {
      const double b = kTwoPi * k / L2;
      sp.eigenvalues.push_back(a * a + b * b + m2);
    }
  }
  TailLaw tail;
  tail.heat.push_back({L1 * L2 / (4.0 * std::numbers::pi), -1.0, m2});
  tail.ell = std::min(L1, L2);
  sp.tail = tail;
  const double kc = kTwoPi * (n_max + 1) / std::max(L1, L2);
  sp.truncation = {n_max, kc * kc + m2, "|j|,|k| <= n_max"};
  sp.normalize();
  return sp;
}

Spectrum interval_dirichlet_spectrum(double T, double mu, long j_max) {
  require(T > 0.0, "interval_dirichlet_spectrum: T must be positive");
  require(mu >= 0.0, "interval_dirichlet_spectrum: mu must be nonnegative");
  require(j_max >= 1, "interval_dirichlet_spectrum: j_max must be at least 1");
  Spectrum sp;
  const double m2 = mu * mu;
  const double c = std::numbers::pi / T;
  for (long j = 1; j <= j_max; ++j) sp.eigenvalues.push_back(c * c * j * j + m2);
  TailLaw tail;
  tail.heat.push_back({T / std::sqrt(4.0 * std::numbers::pi), -0.5, m2});
  tail.heat.push_back({-0.5, 0.0, m2});
  tail.ell = 2.0 * T;
  tail.branches.push_back({c, 1.0, m2, 1});
  sp.tail = tail;
  sp.truncation = {j_max, c * c * (j_max + 1) * (j_max + 1) + m2, "j <= j_max"};
  sp.normalize();
  return sp;
}

}  // namespace speclab::spectra
