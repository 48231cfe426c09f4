#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"

namespace speclab::numerics {

namespace {

using cplx = std::complex<double>;

// B_{2k} / (2k)! for k = 1..4.
constexpr double kBernoulliOverFactorial[4] = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
};

}  // namespace

cplx lerch_sum(cplx s, double shift, int direct_terms) {
  require(shift > 0.0, "lerch_sum: shift must be positive");
  if (std::abs(s - cplx(1.0, 0.0)) < 1e-14) throw NumericalError("lerch_sum: pole at s = 1");
  int n = direct_terms;
  if (n <= 0) n = 24 + static_cast<int>(std::ceil(std::abs(s)));

  cplx acc = 0.0;
  for (int k = 0; k < n; ++k) acc += std::exp(-s * std::log(k + shift));

  const double x = n + shift;
  const double lx = std::log(x);
  const cplx xs = std::exp(-s * lx);  // x^{-s}
  acc += x * xs / (s - 1.0) + 0.5 * xs;
  // Terms B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * x^{-s-2k+1}.
  cplx rising = s;
  double xp = 1.0 / x;
  for (int k = 0; k < 4; ++k) {
    acc += kBernoulliOverFactorial[k] * rising * xs * xp;
    rising *= (s + (2.0 * k + 1.0)) * (s + (2.0 * k + 2.0));
    xp /= x * x;
  }
  return acc;
}

double lerch_sum(double s, double shift, int direct_terms) {
  return lerch_sum(cplx(s, 0.0), shift, direct_terms).real();
}

double hurwitz_deriv_at_zero(double shift) {
  require(shift > 0.0, "hurwitz_deriv_at_zero: shift must be positive");
  return std::lgamma(shift) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace speclab::numerics
