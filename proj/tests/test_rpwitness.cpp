#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/rpwitness.hpp"

using namespace speclab;
using namespace speclab::rpwitness;

namespace {

constexpr double kPi = std::numbers::pi;

// Plain composite Gauss-Legendre on the bump support, for comparison with the
// tanh-substituted trapezoid rule used by the library.
double bump_cosine_reference(double xi) {
  std::vector<double> edges;
  for (int k = 0; k <= 16; ++k) edges.push_back(kPi / 2 - 0.4 + 0.05 * k);
  return numerics::composite_legendre(edges, 30).integrate([xi](double x) { return bump(x) * std::cos(xi * x); });
}

}  // namespace

TEST(RpLine, BumpTransformMatchesDirectQuadrature) {
  for (double xi : {0.0, 0.7, 3.0, 12.0}) EXPECT_NEAR(bump_transform(xi).A, bump_cosine_reference(xi), 1e-13);
  EXPECT_NEAR(bump_laplace(0.0), bump_transform(0.0).A, 1e-15);
  EXPECT_EQ(bump(kPi / 2 + 0.4), 0.0);
  EXPECT_GT(bump(kPi / 2), 0.0);
}

TEST(RpLine, UndifferentiatedBumpPairsPositively) {
  EXPECT_GT(line_pairing(0, 1.0), 0.0);
  EXPECT_NEAR(line_pairing(0, 1.0), 7.310569682152e-03, 1e-13);
}

TEST(RpLine, WitnessAtUnitKappaIsCertifiedNegative) {
  const auto c = line_witness(1.0);
  EXPECT_TRUE(c.negative);
  EXPECT_FALSE(c.flagged);
  EXPECT_EQ(c.parameters.at("n"), 1.0);
  EXPECT_NEAR(c.pairing_value, -5.541689945528e-03, 1e-13);
  EXPECT_LT(c.tolerance, 1e-12);
  ASSERT_EQ(c.trend.size(), 41u);
  EXPECT_NEAR(c.trend[1], c.pairing_value, 0.0);
  EXPECT_NEAR(reevaluate(c), c.pairing_value, 1e-10);
}

TEST(RpLine, UncutPairingIsNonnegativeAndMatchesFourierRoute) {
  // The Fourier route truncates at |xi| = 400, which costs about 1e-11 absolute at n = 1.
  for (auto [n, kappa] : {std::pair{0, 2.0}, std::pair{1, 1.0}}) {
    const double real = line_pairing_uncut(n, kappa);
    EXPECT_GE(real, 0.0);
    EXPECT_NEAR(line_pairing_uncut_fourier(n, kappa), real, 1e-8 * real);
  }
  for (int n = 0; n <= 10; ++n) EXPECT_GE(line_pairing_uncut(n, 0.3), 0.0);
}

TEST(RpLine, RejectsBadInput) {
  EXPECT_THROW(line_witness(0.0), PreconditionError);
  EXPECT_THROW(line_pairing(-1, 1.0), PreconditionError);
}

TEST(RpCylinder, UnitLambdaReducesToLine) {
  const auto cyl = cylinder_witness(1.0);
  const auto line = line_witness(1.0);
  EXPECT_EQ(cyl.parameters.at("n"), line.parameters.at("n"));
  EXPECT_NEAR(cyl.pairing_value, line.pairing_value, 1e-15);
}

TEST(RpCylinder, NegativeForLambdaRangeWithSameProfile) {
  for (double L : {1.0, 10.0, 100.0}) {
    const auto c = cylinder_witness(L, 2.0 * kPi, 1);
    EXPECT_TRUE(c.negative) << L;
    EXPECT_GE(c.uncut_value, -1e-12);
    EXPECT_NEAR(reevaluate(c), c.pairing_value, 1e-10);
    // sqrt(Lambda) times the line pairing at kappa = 1/Lambda.
    EXPECT_NEAR(c.pairing_value / std::sqrt(L), line_pairing(1, 1.0 / L), 1e-15);
  }
  EXPECT_NEAR(cylinder_witness(100.0).pairing_value, -1.246168161967e-01, 1e-12);
}

TEST(RpCylinder, ScaledValueSettlesAsLambdaGrows) {
  // At fixed profile the pairing grows like sqrt(Lambda) times a convergent factor.
  const double a = cylinder_witness(1e4, 2.0 * kPi, 1).pairing_value / 1e2;
  const double b = cylinder_witness(1e6, 2.0 * kPi, 1).pairing_value / 1e3;
  EXPECT_LT(b, 0.0);
  EXPECT_NEAR(a, b, 1e-3 * std::abs(b));
}

TEST(RpCompact, PairingEqualsClosedForm) {
  for (double L : {1.0, 4.0, 16.0, 5.5}) {
    const auto c = compact_witness(L);
    const double ls = largest_odd_eigenvalue(L);
    EXPECT_NEAR(c.pairing_value, -1.0 / (ls + 1.0), 1e-8) << L;
    EXPECT_TRUE(c.negative);
    EXPECT_NEAR(reevaluate(c), c.pairing_value, 1e-10);
  }
  EXPECT_EQ(largest_odd_eigenvalue(5.5), 4.0);
}

TEST(RpCompact, SupportStaysInsideOpenHalfCircle) {
  const auto c = compact_witness(4.0);
  const double margin = c.parameters.at("margin");
  for (double th : {0.0, 0.05, margin - 1e-9, kPi - margin + 1e-9, 3.1, kPi, 4.0, -1.0})
    EXPECT_EQ(compact_function(c.coefficients, margin, th), 0.0) << th;
  EXPECT_NE(compact_function(c.coefficients, margin, 1.0), 0.0);
}

TEST(RpCompact, UncutValueAgreesWithModeSum) {
  for (double L : {1.0, 4.0}) {
    const auto c = compact_witness(L);
    const int K = 400;
    const auto m = compact_moments(c.coefficients, c.parameters.at("margin"), K);
    double sum = m[0] * m[0];
    // cos modes are even and sin modes odd under theta -> -theta.
    for (int k = 1; k <= K; ++k) sum += (m[2 * k - 1] * m[2 * k - 1] - m[2 * k] * m[2 * k]) / (k * k + 1.0);
    EXPECT_GE(c.uncut_value, 0.0);
    EXPECT_NEAR(c.uncut_value, sum, 1e-6 * (1.0 + std::abs(sum)));
  }
}

TEST(RpCompact, BelowFirstOddEigenvalueIsPreconditionError) {
  EXPECT_THROW(compact_witness(0.5), PreconditionError);
}

TEST(RpBall, TargetMatchesRadialQuadrature) {
  for (double L : {1.0, 4.0, 9.0}) {
    const double R = std::sqrt(L);
    const double radial =
        numerics::gauss_legendre(60, 0.0, R).integrate([](double r) { return r * r * r * r / (1.0 + r * r); });
    EXPECT_NEAR(ball_target(L), -4.0 * kPi / 3.0 * radial, 1e-12);
    EXPECT_LT(ball_target(L), 0.0);
  }
}

TEST(RpBall, PairingMatchesTwoDimensionalQuadrature) {
  // Integrate over (xi_1, transverse radius) directly instead of through the log weight.
  const std::vector<double> a = {0.7, -0.2, 0.4};
  BallOptions opt;
  const double L = 4.0;
  const double R = 2.0;
  const auto x = numerics::gauss_legendre(120, -R, R);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x.nodes[i];
    const double t = std::sqrt(L - xi * xi);
    const double psi = numerics::composite_legendre({-0.5, -0.25, 0.0, 0.25, 0.5}, 40).integrate([xi](double u) {
      return std::abs(u) < 0.5 ? std::exp(-1.0 / (1.0 - 4.0 * u * u)) * std::cos(xi * u) : 0.0;
    });
    double cs = 0.0, sn = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double cj = opt.offset + opt.bump_width + j * opt.spacing;
      cs += a[static_cast<std::size_t>(j)] * std::cos(xi * cj);
      sn += a[static_cast<std::size_t>(j)] * std::sin(xi * cj);
    }
    const double re_sq = xi * xi * psi * psi * (sn * sn - cs * cs);
    const double disk = numerics::gauss_legendre(40, 0.0, t).integrate(
        [xi](double r) { return 2.0 * kPi * r / (1.0 + xi * xi + r * r); });
    acc += x.weights[i] * disk * re_sq;
  }
  EXPECT_NEAR(ball_pairing(L, a, opt), acc, 1e-10 * std::abs(acc));
}

TEST(RpBall, WitnessApproachesTargetAtDocumentedBasisSize) {
  const auto c = fourier_ball_witness(4.0, 8);
  EXPECT_TRUE(c.negative);
  EXPECT_FALSE(c.flagged) << c.note;
  EXPECT_LT(std::abs(c.pairing_value - ball_target(4.0)), 0.1 * std::abs(ball_target(4.0)));
  ASSERT_EQ(c.trend.size(), 8u);
  EXPECT_GE(c.uncut_value, -1e-12);
  EXPECT_NEAR(reevaluate(c), c.pairing_value, 1e-10);
  // A single bump is a weak approximation; its value is recorded whatever its sign.
  EXPECT_GT(c.trend.front(), c.trend.back());
}

TEST(RpBall, UncutValueMatchesFourierIntegral) {
  const auto c = fourier_ball_witness(4.0, 3);
  BallOptions opt;
  std::vector<double> edges;
  for (double e = 0.0; e <= 300.0; e += 0.5) edges.push_back(e);
  const auto rx = numerics::composite_legendre(edges, 16);
  const auto rr = numerics::gauss_legendre(40, 0.0, 2.0);
  std::vector<double> psi(rx.size());
  for (std::size_t q = 0; q < rx.size(); ++q) {
    const double xi = rx.nodes[q];
    psi[q] = numerics::composite_legendre({-0.5, -0.25, 0.0, 0.25, 0.5}, 40).integrate([xi](double u) {
      return std::abs(u) < 0.5 ? std::exp(-1.0 / (1.0 - 4.0 * u * u)) * std::cos(xi * u) : 0.0;
    });
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double r = rr.nodes[i];
    double inner = 0.0;
    for (std::size_t q = 0; q < rx.size(); ++q) {
      const double xi = rx.nodes[q];
      double cs = 0.0, sn = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        const double cj = opt.offset + opt.bump_width + static_cast<double>(j) * opt.spacing;
        cs += c.coefficients[j] * std::cos(xi * cj);
        sn += c.coefficients[j] * std::sin(xi * cj);
      }
      const double f = xi * psi[q];
      inner += rx.weights[q] * f * f * (sn * sn - cs * cs) / (1.0 + xi * xi + r * r);
    }
    acc += rr.weights[i] * 2.0 * kPi * r * 2.0 * inner;
  }
  EXPECT_NEAR(c.uncut_value, acc, 1e-8 * acc);
}

TEST(RpCertificate, ConstructionNamesRoundTrip) {
  for (auto c : {Construction::line_derivative, Construction::cylinder, Construction::compact_dual,
                 Construction::fourier_ball})
    EXPECT_EQ(construction_from_string(to_string(c)), c);
  EXPECT_THROW(construction_from_string("disk"), PreconditionError);
}

TEST(RpPhi4, SmallCouplingAgreesWithGaussianPairing) {
  const auto c = compact_witness(4.0);
  for (double g : {0.0, 1e-4, 1e-3}) {
    const auto r = phi4_reweighted_pairing(c, g, 1000000, 2024);
    EXPECT_NEAR(r.gaussian_value, -0.2, 1e-8);
    EXPECT_LT(std::abs(r.mean - r.gaussian_value), 3.0 * r.stderr_) << g;
  }
}

TEST(RpPhi4, ParallelMatchesSerialBitForBit) {
  const auto c = compact_witness(1.0);
  const auto p = phi4_reweighted_pairing(c, 1e-2, 20000, 5, 32, true);
  const auto s = phi4_reweighted_pairing(c, 1e-2, 20000, 5, 32, false);
  EXPECT_EQ(p.mean, s.mean);
  EXPECT_EQ(p.stderr_, s.stderr_);
}
