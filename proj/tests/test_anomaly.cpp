#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "speclab/anomaly.hpp"
#include "speclab/error.hpp"

using namespace speclab;
using namespace speclab::anomaly;

namespace {

constexpr double kPi = std::numbers::pi;

Field bump_h() {
  // Low-degree harmonics; even part nonzero at both poles.
  return Field::polynomial({{0.2, 0, 0, 1}, {0.15, 1, 0, 0}, {0.1, 1, 1, 0}, {0.25, 0, 0, 2}, {-0.05, 0, 0, 0}});
}

Field antipodal(const std::vector<Monomial>& terms) {
  std::vector<Monomial> out = terms;
  for (auto& m : out)
    if ((m.a + m.b + m.e) % 2) m.c = -m.c;
  return Field::polynomial(out);
}

}  // namespace

TEST(AnomalyFields, LaplacianOfLogDistanceMatchesFiniteDifferenceOfPolynomialRoute) {
  // A polynomial field and its tangential calculus against a hand computation:
  // f = z restricted to the sphere is an l = 1 harmonic, so Delta f = -2 f.
  const Field f = Field::polynomial({{1.0, 0, 0, 1}});
  const V3 x = V3(0.3, -0.4, 0.5).normalized();
  EXPECT_NEAR(f.laplacian(x), -2.0 * x.z(), 1e-14);
  EXPECT_NEAR(f.gradient(x).squaredNorm(), 1.0 - x.z() * x.z(), 1e-14);
  // The same zonal function through the zonal route.
  const Field g = Field::zonal(V3::UnitZ(), [](double t) { return t; }, [](double) { return 1.0; },
                               [](double) { return 0.0; });
  EXPECT_NEAR(g.laplacian(x), f.laplacian(x), 1e-14);
  const Field l = Field::log_distance(V3::UnitZ(), 1.0);
  EXPECT_NEAR(l.laplacian(x), -0.5, 1e-15);
}

TEST(AnomalySmooth, ZeroField) {
  const auto a = anomaly_smooth(Field::zero());
  EXPECT_EQ(a.value, 0.0);
  EXPECT_FALSE(a.epsilon_extrapolation.has_value());
}

TEST(AnomalySmooth, ConstantGivesGaussBonnetValue) {
  for (double c : {0.7, -1.3, 2.0}) EXPECT_NEAR(anomaly_smooth(Field::constant(c)).value, c / 3.0, 1e-12);
}

TEST(AnomalySmooth, FirstHarmonicClosedForm) {
  // sigma = a z: |grad sigma|^2 = a^2 (1 - z^2) integrates to 8 pi a^2 / 3 and
  // the curvature term integrates to zero.
  const double a = 0.6;
  EXPECT_NEAR(anomaly_smooth(Field::polynomial({{a, 0, 0, 1}})).value, a * a / 9.0, 1e-12);
}

TEST(AnomalySmooth, CocycleForRandomFields) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Field w = Field::random_polynomial(2, 0.3, seed);
    const Field s1 = Field::random_polynomial(3, 0.4, 100 + seed);
    const Field s2 = Field::random_polynomial(3, 0.4, 200 + seed);
    const double a21 = anomaly_smooth(s1, w).value;
    const double a32 = anomaly_smooth(s2, w + s1).value;
    const double a31 = anomaly_smooth(s1 + s2, w).value;
    EXPECT_LE(std::abs(a32 + a21 - a31), 1e-8) << "seed " << seed;
  }
}

TEST(AnomalySmooth, ParallelQuadratureMatchesSerial) {
  const Field s = Field::random_polynomial(3, 0.5, 7);
  const auto grid = sphere_grid(64);
  auto F = [&](const V3& x) { return s.gradient(x).squaredNorm() + 2.0 * s.value(x); };
  EXPECT_NEAR(integrate(grid, F), integrate_serial(grid, F), 1e-12);
}

TEST(AnomalyPullback, ConformalFactorMatchesComplexFormula) {
  const auto data = pullback_zd(2);
  for (std::complex<double> z : {std::complex<double>(0.3, 0.1), {1.7, -0.4}, {-0.2, 2.5}}) {
    const double r2 = std::norm(z);
    const double pulled = 4.0 * 4.0 * r2 / std::pow(1.0 + r2 * r2, 2);
    const double round = 4.0 / std::pow(1.0 + r2, 2);
    EXPECT_NEAR(std::exp(2.0 * data.sigma.value(from_complex(z))), pulled / round, 1e-12);
  }
  // Degree-2 cover of the unit sphere has twice its area.
  const double area = integrate(sphere_grid(64), [&](const V3& x) { return std::exp(2.0 * data.sigma.value(x)); });
  EXPECT_NEAR(area, 8.0 * kPi, 1e-10);
}

TEST(AnomalyPullback, ConicalCurvatureIntegralUsesPositiveDefect) {
  for (int d : {2, 3}) {
    const auto data = pullback_zd(d);
    double sum_gamma = 0.0;
    for (const auto& p : data.divisor) sum_gamma += p.gamma;
    // Smooth part of z^d pulled back has curvature 1 and area 4 pi d.
    EXPECT_NEAR(conical_curvature_integral(data, 96), 4.0 * kPi * d, 1e-10);
    EXPECT_NEAR(conical_curvature_integral(data, 96), 4.0 * kPi + 2.0 * kPi * sum_gamma, 1e-10);
  }
}

TEST(AnomalyRenormalized, EmptyDivisorEqualsSmooth) {
  ConicalSurfaceData data;
  data.sigma = Field::random_polynomial(2, 0.4, 3);
  EXPECT_DOUBLE_EQ(anomaly_renormalized(data, default_eps_ladder(data)).value,
                   anomaly_smooth(data.sigma, Field::zero(), 192).value);
}

TEST(AnomalyRenormalized, SingleConeMatchesSemiAnalyticOracle) {
  // sigma = log|x - p|: -int sigma Delta sigma = (1/2) int sigma = pi (2 log 2 - 1),
  // 2 int sigma = 4 pi (2 log 2 - 1), and the g~-radius satisfies log delta ~ (1/2) log(2 eps).
  const double oracle = (5.0 * (2.0 * std::log(2.0) - 1.0) - std::log(2.0)) / 24.0;
  const auto data = single_cone(V3(0.0, 0.0, -1.0), 1.0);
  const auto ra = anomaly_renormalized(data, default_eps_ladder(data));
  ASSERT_TRUE(ra.epsilon_extrapolation->converged);
  EXPECT_NEAR(ra.value, oracle, 1e-8);
  EXPECT_LE(ra.quadrature_error, 1e-9);
  // The same cone placed elsewhere on the sphere.
  const auto other = single_cone(V3(0.48, -0.6, 0.64), 1.0);
  const auto moved = anomaly_renormalized(other, default_eps_ladder(other));
  EXPECT_NEAR(moved.value, oracle, 1e-8);
}

TEST(AnomalyRenormalized, ReferenceMetricIndependence) {
  const auto data = pullback_zd(2);
  auto shifted = data;
  shifted.reference = Field::polynomial({{0.3, 1, 0, 0}, {0.2, 0, 1, 1}, {0.1, 0, 0, 1}});
  const double ra0 = anomaly_renormalized(data, default_eps_ladder(data)).value;
  const double ra1 = anomaly_renormalized(shifted, default_eps_ladder(data)).value;
  const double a10 = anomaly_smooth(shifted.reference).value;
  EXPECT_LE(std::abs(ra0 - ra1 - a10), 1e-8);
}

TEST(AnomalyRenormalized, CountertermSlope) {
  for (int d : {2, 3}) {
    const auto data = pullback_zd(d);
    const auto fit = counterterm_slope(data, default_eps_ladder(data));
    EXPECT_LE(fit.relative_error, 0.02) << "d = " << d << " slope " << fit.slope;
  }
}

TEST(AnomalyRenormalized, RejectsBadInput) {
  auto data = single_cone(V3::UnitZ(), 1.0);
  const auto ladder = default_eps_ladder(data);
  EXPECT_THROW(anomaly_renormalized(data, {1e-3, 2e-3, 4e-3}), PreconditionError);
  EXPECT_THROW(anomaly_renormalized(data, {0.5, 0.25, 0.125}), PreconditionError);
  data.divisor[0].gamma = -1.0;
  EXPECT_THROW(anomaly_renormalized(data, ladder), PreconditionError);
}

TEST(AnomalyRegular, ZeroAndConstant) {
  const auto data = pullback_zd(2);
  EXPECT_EQ(anomaly_regular_conical(Field::zero(), data).value, 0.0);
  // (1/24 pi) 2c (4 pi + 2 pi sum gamma) = 2c/3 for two cone points of exponent 1.
  for (double c : {0.5, -1.2}) EXPECT_NEAR(anomaly_regular_conical(Field::constant(c), data).value, 2.0 * c / 3.0, 1e-12);
}

TEST(AnomalyRegular, EvenUnderAntipodeForSymmetricDivisor) {
  const auto data = pullback_zd(2);
  const std::vector<Monomial> terms{{0.3, 1, 0, 0}, {0.2, 0, 1, 1}, {-0.4, 0, 0, 1}, {0.1, 2, 0, 1}};
  EXPECT_NEAR(anomaly_regular_conical(Field::polynomial(terms), data).value,
              anomaly_regular_conical(antipodal(terms), data).value, 1e-8);
}

TEST(AnomalyScaling, ZeroShiftGivesZeroResidual) {
  const auto data = pullback_zd(2);
  const auto rep = conical_scaling_check(data, Field::zero(), default_eps_ladder(data));
  EXPECT_LE(std::abs(rep.residual), 1e-12);
}

TEST(AnomalyScaling, PullbackResidual) {
  const Field h = bump_h();
  const auto data = pullback_zd(2);
  const auto rep = conical_scaling_check(data, h, default_eps_ladder(data));
  EXPECT_TRUE(rep.converged);
  EXPECT_GT(std::abs(rep.correction), 0.01);
  EXPECT_LE(std::abs(rep.residual), 1e-4);
  // Cone points of exponent 2.
  const auto data3 = pullback_zd(3);
  const auto rep3 = conical_scaling_check(data3, h, default_eps_ladder(data3));
  EXPECT_LE(std::abs(rep3.residual), 1e-4);
}

TEST(AnomalyScaling, CorrectionIsLinearInSmallExponent) {
  const Field h = Field::constant(1.0);
  for (double g : {1e-2, 1e-3}) {
    const auto data = single_cone(V3::UnitZ(), g);
    const auto rep = conical_scaling_check(data, h, default_eps_ladder(data));
    EXPECT_NEAR(rep.correction / g, 1.0 / 6.0, g);
    EXPECT_LE(std::abs(rep.residual), 1e-4);
  }
}

TEST(ConeRadialDistance, FlatCases) {
  const std::vector<double> r{0.4, 0.2, 0.1, 0.05};
  const auto flat0 = cone_radial_distance_profile([](double) { return 0.0; }, 0.0, r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(flat0.distance[i], flat0.r[i], 1e-14);
  const auto flat1 = cone_radial_distance_profile([](double) { return 0.0; }, 1.0, r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(flat1.distance[i], 0.5 * flat1.r[i] * flat1.r[i], 1e-10);
}

TEST(ConeRadialDistance, PullbackChartOracle) {
  // z -> z^2 pulls back e^{2h(w)}|dw|^2 to 4 e^{2h(z^2)} |z|^2 |dz|^2, so along
  // the ray of angle alpha, phi = log 2 + h(rho^2 e^{2 i alpha}).
  const double alpha = 0.4;
  auto h = [](std::complex<double> w) { return 0.3 * w.real() + 0.1 * std::norm(w); };
  auto phi = [&](double rho) { return std::log(2.0) + h(std::polar(rho * rho, 2.0 * alpha)); };
  const auto rd = cone_radial_distance_profile(phi, 1.0, {0.2, 0.1, 0.05, 0.025});
  EXPECT_NEAR(rd.predicted_coefficient, 1.0, 1e-15);
  EXPECT_LE(rd.relative_error, 1e-4);
}

TEST(ConeRadialDistance, SpherePullbackLeadingCoefficient) {
  const auto data = pullback_zd(2);
  EXPECT_NEAR(regular_value_at(data, 0), 0.0, 1e-10);
  for (double alpha : {0.0, 1.1}) {
    const auto rd = cone_radial_distance(data, 0, {0.2, 0.1, 0.05, 0.025}, alpha);
    EXPECT_NEAR(rd.predicted_coefficient, 0.5, 1e-10);
    EXPECT_LE(rd.relative_error, 1e-4);
  }
  EXPECT_THROW(cone_radial_distance(data, 0, {2.0, 1.0, 0.5}), PreconditionError);
}

TEST(ConeRadialDistance, RegularPartDecay) {
  EXPECT_NEAR(regular_decay_exponent(pullback_zd(2), 0), 2.0, 0.05);
  auto data = pullback_zd(2);
  data.sigma = data.sigma + bump_h();
  EXPECT_GE(regular_decay_exponent(data, 0), 0.9);
}

TEST(LogIntegralAsymptotics, Annulus) {
  const auto c = annulus_check(single_cone(V3::UnitZ(), 1.0), 0, 2.0, {1e-2, 1e-3, 1e-4});
  EXPECT_NEAR(c.values.back(), 2.0 * kPi * std::log(2.0), 1e-6);
  EXPECT_FALSE(c.flagged);
  const auto p = annulus_check(pullback_zd(2), 1, 2.0, {1e-2, 1e-3, 1e-4});
  EXPECT_NEAR(p.values.back(), 2.0 * kPi * std::log(2.0), 1e-6);
  const auto zero = annulus_check(single_cone(V3::UnitZ(), 0.0), 0, 2.0, {1e-2, 1e-3});
  EXPECT_NEAR(zero.values.back(), 0.0, 1e-14);
}

TEST(LogIntegralAsymptotics, GreenStokes) {
  const Field h = bump_h();
  const auto c = green_stokes_check(single_cone(V3(0.0, 0.0, -1.0), 1.0), 0, h, {1e-2, 1e-3, 1e-4});
  EXPECT_NEAR(c.values.back(), -2.0 * kPi * h.value(V3(0.0, 0.0, -1.0)), 1e-6);
  EXPECT_FALSE(c.flagged);
}

TEST(LogIntegralAsymptotics, BasicRenormalization) {
  for (const auto& data : {single_cone(V3::UnitZ(), 1.0), pullback_zd(2)}) {
    const auto c = basic_renorm_check(data, {1e-2, 1e-3, 1e-4});
    EXPECT_LE(c.limit_error, 1e-6);
    EXPECT_GE(c.rate, 1.5);
    EXPECT_FALSE(c.flagged);
  }
}

TEST(BranchedWeights, FormulaInstances) {
  const auto w = branched_weights(2, {{2}, {2}}, 1.0);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(w[1], 1.0 / 8.0);
  for (int d = 2; d <= 7; ++d) EXPECT_DOUBLE_EQ(weight_zd(d, 2.5), 2.5 / 12.0 * (d - 1.0 / d));
  for (double v : branched_weights(3, {{1, 1, 1}, {1, 1, 1}}, 1.0)) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(branched_weights(3, {{2, 1}}, 1.0)[0], 1.0 / 8.0);
  EXPECT_THROW(branched_weights(3, {{2, 2}}, 1.0), PreconditionError);
  EXPECT_THROW(branched_weights(2, {{0, 2}}, 1.0), PreconditionError);
}

TEST(BranchedWeights, CompositionMultipliesOrders) {
  // z^2 after z^3: the single preimage of 0 has order 2 * 3; the weight is that of z^6.
  const auto composed = branched_weights(6, {{2 * 3}}, 1.0);
  EXPECT_DOUBLE_EQ(composed[0], weight_zd(6, 1.0));
  // z^2 after (z^3 + 1): over 0, the three simple zeros of z^3 + 1 each get order 2.
  const auto spread = branched_weights(6, {{2, 2, 2}}, 1.0);
  EXPECT_DOUBLE_EQ(spread[0], 3.0 * weight_zd(2, 1.0));
}

TEST(Renyi, ClosedFormAndExponent) {
  const double L = 3.0, C = 1.7;
  const auto r = renyi_entropy(L, L / 2.0, 2, 1.0, C);
  EXPECT_NEAR(r.trace, C * std::pow(L / kPi, -0.25), 1e-15);
  EXPECT_NEAR(r.entropy, -std::log(r.trace), 1e-15);
  for (int d = 2; d <= 6; ++d)
    for (double c : {0.5, 1.0, 26.0}) EXPECT_DOUBLE_EQ(renyi_entropy(L, 1.0, d, c, C).exponent, -2.0 * weight_zd(d, c));
  EXPECT_EQ(renyi_exponent(1.0, 1.0), 0.0);
  EXPECT_THROW(renyi_entropy(L, L, 2, 1.0, C), PreconditionError);
  EXPECT_THROW(renyi_entropy(L, 0.0, 2, 1.0, C), PreconditionError);
  EXPECT_THROW(renyi_entropy(L, 1.0, 1, 1.0, C), PreconditionError);
}

TEST(Renyi, TwoPointForm) {
  EXPECT_DOUBLE_EQ(two_point(kPi, 0.125, 2.0), 2.0);
  EXPECT_NEAR(two_point(kPi / 3.0, 0.125, 1.0), std::pow(0.5, -0.25), 1e-15);
}
