#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "speclab/error.hpp"
#include "speclab/spectra.hpp"
#include "speclab/zeta.hpp"

using namespace speclab;
using namespace speclab::zeta;
using spectra::twisted_circle_spectrum;

namespace {
constexpr double kPi = std::numbers::pi;

Spectrum finite(std::vector<double> v) {
  Spectrum s;
  s.eigenvalues = std::move(v);
  s.normalize();
  return s;
}

// Oracle: the product over p of (2 cosh b - 2 cos((2 pi p + theta)/N)), b = a/N.
double chebyshev_product(double a, double theta, int n) {
  double prod = 1.0;
  for (int p = 0; p < n; ++p) prod *= 2.0 * std::cosh(a / n) - 2.0 * std::cos((2.0 * kPi * p + theta) / n);
  return prod;
}
}  // namespace

TEST(ZetaOfSpectrum, MasslessCircleAtTwo) {
  const Spectrum s = twisted_circle_spectrum({2 * kPi, 0.0, 0.0}, 40);
  double oracle = 0.0;
  for (long n = 200000; n >= 1; --n) oracle += 2.0 / std::pow(static_cast<double>(n), 4);
  const double target = std::pow(kPi, 4) / 45.0;
  EXPECT_NEAR(oracle, target, 1e-12);
  EXPECT_NEAR(zeta_of_spectrum(s, 2.0).value.real(), target, 1e-10);
  EXPECT_NEAR(zeta_mellin(heat_model(s), 2.0).value.real(), target, 1e-10);
}

TEST(ZetaOfSpectrum, FiniteSpectra) {
  EXPECT_DOUBLE_EQ(zeta_of_spectrum(finite({1.0, 2.0}), 1.0).value.real(), 1.5);
  EXPECT_DOUBLE_EQ(zeta_of_spectrum(finite(std::vector<double>{3.7}), 0.0).value.real(), 1.0);
}

TEST(ZetaOfSpectrum, FrozenArbitraryPrecisionValues) {
  const Spectrum c = twisted_circle_spectrum({2 * kPi, 1.0, 0.0}, 60);
  EXPECT_NEAR(zeta_closed_form(c, 0.75).value.real(), 5.25121922420103688, 1e-12);
  EXPECT_NEAR(zeta_mellin(heat_model(c), 0.75).value.real(), 5.25121922420103688, 1e-10);
  EXPECT_NEAR(zeta_closed_form(c, 2.0).value.real(), 1.61367395084581739, 1e-13);
  const Spectrum t = twisted_circle_spectrum({3.0, 0.5, 1.0}, 60);
  EXPECT_NEAR(zeta_closed_form(t, 1.5).value.real(), 4.88143009044905127, 1e-12);
  EXPECT_NEAR(zeta_mellin(heat_model(t), 1.5).value.real(), 4.88143009044905127, 1e-10);
  const Spectrum tor = spectra::torus_spectrum(2 * kPi, 2 * kPi, 1.0, 20);
  EXPECT_NEAR(zeta_mellin(heat_model(tor), 2.0).value.real(), 3.22658136442335977, 1e-10);
}

TEST(ZetaOfSpectrum, MethodsAgreeForLargeRealPart) {
  const std::vector<Spectrum> sps = {twisted_circle_spectrum({2 * kPi, 1.0, 0.0}, 400),
                                     twisted_circle_spectrum({1.7, 0.0, 2.0}, 400),
                                     spectra::interval_dirichlet_spectrum(2.0, 0.3, 400),
                                     spectra::torus_spectrum(2 * kPi, 3.0, 0.5, 60)};
  for (const Spectrum& sp : sps)
    for (double s : {2.0, 2.5, 4.0}) {
      const ZetaEvaluation d = zeta_direct(sp, s);
      const ZetaEvaluation m = zeta_mellin(heat_model(sp), s);
      EXPECT_LE(std::abs(d.value - m.value), d.error_estimate + m.error_estimate + 1e-12) << s;
    }
}

TEST(ZetaOfSpectrum, PolesAreRejected) {
  const Spectrum c = twisted_circle_spectrum({2 * kPi, 1.0, 0.0}, 30);
  EXPECT_THROW(zeta_closed_form(c, 0.5), NumericalError);
  EXPECT_THROW(zeta_closed_form(c, -0.5), NumericalError);
  EXPECT_THROW(zeta_mellin(heat_model(c), 0.5), NumericalError);
  Spectrum noTail = c;
  noTail.tail.reset();
  noTail.truncation.complete_below = INFINITY;
  EXPECT_NO_THROW(zeta_of_spectrum(noTail, 2.0));
}

TEST(DetZeta, MassiveCircle) {
  for (auto [L, m] : std::vector<std::pair<double, double>>{{2 * kPi, 1.0}, {1.0, 3.0}, {5.0, 0.2}}) {
    const Spectrum s = twisted_circle_spectrum({L, m, 0.0}, 80);
    const double oracle = 4.0 * std::pow(std::sinh(0.5 * m * L), 2);
    EXPECT_NEAR(det_zeta(s) / oracle, 1.0, 1e-8);
  }
  const Spectrum s = twisted_circle_spectrum({2 * kPi, 1.0, 0.0}, 80);
  EXPECT_NEAR(det_zeta(s, Method::mellin_split) / (4.0 * std::pow(std::sinh(kPi), 2)), 1.0, 1e-8);
}

TEST(DetZeta, MasslessPrimedCircleAndScaling) {
  for (double L : {1.0, 2 * kPi, 7.5}) {
    const Spectrum s = twisted_circle_spectrum({L, 0.0, 0.0}, 80);
    EXPECT_EQ(s.kernel_dim, 1);
    EXPECT_NEAR(det_zeta(s) / (L * L), 1.0, 1e-8);
    EXPECT_NEAR(det_zeta(s, Method::mellin_split) / (L * L), 1.0, 1e-8);
  }
  const double d1 = det_zeta(twisted_circle_spectrum({2.0, 0.0, 0.0}, 50));
  const double d3 = det_zeta(twisted_circle_spectrum({6.0, 0.0, 0.0}, 50));
  EXPECT_NEAR(d3 / d1, 9.0, 1e-8);
}

TEST(DetZeta, TwistedCircleChebyshev) {
  for (double theta : {kPi / 3, kPi / 2, kPi, 2.2}) {
    for (auto [L, m] : std::vector<std::pair<double, double>>{{2 * kPi, 1.0}, {3.0, 0.0}, {1.5, 0.8}}) {
      const double a = m * L;
      const double closed = 2.0 * std::cosh(a) - 2.0 * std::cos(theta);
      EXPECT_NEAR(chebyshev_product(a, theta, 9) / closed, 1.0, 1e-12);
      const Spectrum s = twisted_circle_spectrum({L, m, theta}, 80);
      EXPECT_NEAR(det_zeta(s) / closed, 1.0, 1e-8);
      EXPECT_NEAR(det_zeta(s, Method::mellin_split) / closed, 1.0, 1e-8);
    }
  }
}

TEST(DetZeta, DirichletInterval) {
  for (auto [T, mu] : std::vector<std::pair<double, double>>{{1.0, 0.5}, {kPi, 2.0}}) {
    const Spectrum s = spectra::interval_dirichlet_spectrum(T, mu, 200);
    const double oracle = 2.0 * std::sinh(mu * T) / mu;
    EXPECT_NEAR(det_zeta(s) / oracle, 1.0, 1e-8);
    EXPECT_NEAR(det_zeta(s, Method::mellin_split) / oracle, 1.0, 1e-8);
  }
}

TEST(DetZeta, PositiveOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Spectrum s = twisted_circle_spectrum({u(rng), u(rng), u(rng)}, 40);
    EXPECT_GT(det_zeta(s), 0.0);
  }
}

TEST(Fredholm, Examples) {
  EXPECT_DOUBLE_EQ(det_fredholm({}), 1.0);
  EXPECT_DOUBLE_EQ(det_fredholm({1.0, 1.0}), 4.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 0.3);
  Eigen::MatrixXd a(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 5);
  const double dense = (Eigen::MatrixXd::Identity(5, 5) + a).determinant();
  EXPECT_NEAR(det_fredholm(ev), dense, 1e-12 * std::abs(dense));
  double tr = 0.0;
  for (double x : ev) tr += std::abs(x);
  EXPECT_LE(std::abs(det_fredholm(ev)), std::exp(tr));
  EXPECT_THROW(det_fredholm({INFINITY}), PreconditionError);
}

TEST(Fredholm, ContinuityBound) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(12), b(12);
    double na = 0, nb = 0, nd = 0;
    for (int i = 0; i < 12; ++i) {
      a[i] = u(rng) / (i + 1);
      b[i] = a[i] + 0.1 * u(rng) / (i + 1);
      na += std::abs(a[i]);
      nb += std::abs(b[i]);
      nd += std::abs(a[i] - b[i]);
    }
    EXPECT_LE(std::abs(det_fredholm(a) - det_fredholm(b)), nd * std::exp(na + nb + 1.0));
  }
}

TEST(Factorization, TrivialPerturbation) {
  DiagonalPair p;
  p.a = twisted_circle_spectrum({2.0, 1.0, 0.5}, 40);
  p.ak = p.a;
  EXPECT_EQ(factorization_check(p).residual, 0.0);
}

TEST(Factorization, MasslessToMassive) {
  for (double m : {0.3, 1.0, 2.0}) {
    const FactorizationReport r = factorization_check(massless_to_massive_circle(2 * kPi, m, 64));
    EXPECT_LE(r.residual, 1e-8) << m;
  }
}

TEST(Factorization, TwistShift) {
  const FactorizationReport r = factorization_check(twist_shift(2 * kPi, 0.7, 0.4, 2.1, 1024));
  EXPECT_LE(r.residual, 1e-6);
}

TEST(Bfk, DnScalarMatchesBoundaryValueSolve) {
  // Oracle: finite-difference solve of -u'' + mu^2 u = 0 on [0, L1] with
  // u(0) = u(L1) = 1; the DN value is the outward flux summed over both ends.
  const double mu = 1.0, L1 = 2.0;
  const int n = 4000;
  const double h = L1 / n;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n - 1, 2.0 + mu * mu * h * h);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
  rhs(0) = rhs(n - 2) = 1.0;
  // Thomas algorithm for the tridiagonal system with off-diagonals -1.
  Eigen::VectorXd c(n - 1), d(n - 1);
  c(0) = -1.0 / diag(0);
  d(0) = rhs(0) / diag(0);
  for (int i = 1; i < n - 1; ++i) {
    const double den = diag(i) + c(i - 1);
    c(i) = -1.0 / den;
    d(i) = (rhs(i) + d(i - 1)) / den;
  }
  Eigen::VectorXd u(n - 1);
  u(n - 2) = d(n - 2);
  for (int i = n - 3; i >= 0; --i) u(i) = d(i) - c(i) * u(i + 1);
  // Second-order one-sided derivative at x = 0.
  const double flux0 = (3.0 * 1.0 - 4.0 * u(0) + u(1)) / (2.0 * h);
  const double oracle = 2.0 * flux0;
  EXPECT_NEAR(dn_mode_scalar(1.0, 2.0), 2.0 * std::tanh(1.0), 1e-15);
  EXPECT_NEAR(dn_mode_scalar(1.0, 2.0), oracle, 1e-5);
}

TEST(Bfk, DnMinusSquareRootIsSummable) {
  double acc = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double mu = std::sqrt(n * n + 1.0);
    const double diff = dn_mode_scalar(mu, 2 * kPi) - 2.0 * mu;
    EXPECT_NEAR(diff, 2.0 * mu * (std::tanh(mu * kPi) - 1.0), 1e-12);
    acc += std::abs(diff);
  }
  EXPECT_LT(acc, 0.1);
}

TEST(Bfk, FlatTorusIdentity) {
  const BfkReport r = bfk_torus_check(2 * kPi, 2 * kPi, 1.0, 1024);
  // Independent Chowla-Selberg evaluation at 25 digits.
  EXPECT_NEAR(r.log_det_torus, 3.13334716233392668, 1e-9);
  EXPECT_NEAR(r.log_det_dirichlet, -0.00208486163615359823, 1e-9);
  EXPECT_NEAR(r.log_det_torus_modes, r.log_det_torus, 1e-9);
  EXPECT_NEAR(r.log_det_dirichlet_modes, r.log_det_dirichlet, 1e-9);
  EXPECT_LE(r.residual, 1e-5);
  EXPECT_THROW(bfk_torus_check(2 * kPi, 2 * kPi, 0.0, 1024), PreconditionError);
}

TEST(Bfk, OtherModuli) {
  const BfkReport r = bfk_torus_check(1.3, 4.0, 0.6, 128);
  EXPECT_NEAR(r.log_det_torus_modes, r.log_det_torus, 1e-9);
  EXPECT_LE(r.residual, 1e-8);
}
