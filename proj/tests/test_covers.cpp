#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "speclab/covers.hpp"
#include "speclab/error.hpp"

using namespace speclab;
using namespace speclab::covers;

namespace {
constexpr double kPi = std::numbers::pi;

CoverSpec circle(double L, double m) {
  CoverSpec s;
  s.geometry = Geometry::circle;
  s.L = L;
  s.m = m;
  return s;
}
}  // namespace

TEST(HeatTrace, ThetaIdentityOverGrid) {
  for (int N : {1, 2, 7, 16, 64})
    for (double t : {0.05, 0.1, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0}) {
      const HeatTracePair h = heat_trace_cover(2 * kPi, N, t);
      EXPECT_LT(h.difference, 1e-10) << "N=" << N << " t=" << t;
    }
  const HeatTracePair h1 = heat_trace_cover(1.3, 5, 0.7);
  EXPECT_LT(h1.difference, 1e-10);
}

TEST(HeatTrace, Limits) {
  EXPECT_NEAR(heat_trace_cover(2 * kPi, 1, 200.0).eigen_sum, 1.0, 1e-80);
  const double t = 1e-4, NL = 3 * 2 * kPi;
  EXPECT_NEAR(heat_trace_cover(2 * kPi, 3, t).eigen_sum * std::sqrt(4 * kPi * t) / NL, 1.0, 1e-12);
  EXPECT_THROW(heat_trace_cover(1.0, 1, 0.0), PreconditionError);
}

TEST(HeatTrace, ParallelMatchesSerial) {
  for (double t : {0.05, 1.0})
    EXPECT_NEAR(heat_trace_cover(2 * kPi, 64, t).eigen_sum, heat_trace_eigen_sum_serial(2 * kPi, 64, t),
                1e-12 * heat_trace_eigen_sum_serial(2 * kPi, 64, t));
}

TEST(FreeEnergy, MasslessCircle) {
  const std::vector<int> ns{2, 4, 8, 16, 32, 64};
  const CoverFreeEnergySeq seq = free_energy_sequence(circle(1.0, 0.0), ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double n = ns[i];
    EXPECT_NEAR(seq.values[i], std::log(n * n) / n, 1e-10);
  }
  EXPECT_LT(seq.max_pair_difference, 1e-8);
  EXPECT_NEAR(seq.limit_estimate.value, 0.0, 1e-6);
}

TEST(FreeEnergy, MassiveCircle) {
  const CoverFreeEnergySeq seq = free_energy_sequence(circle(1.0, 1.0), {2, 4, 8, 16, 32});
  for (std::size_t i = 0; i < seq.N_list.size(); ++i) {
    const double n = seq.N_list[i];
    EXPECT_NEAR(seq.values[i], std::log(4 * std::pow(std::sinh(n / 2), 2)) / n, 1e-10);
  }
  EXPECT_LT(seq.max_pair_difference, 1e-8);
  EXPECT_NEAR(seq.limit_estimate.value, 1.0, 1e-8);
  EXPECT_TRUE(seq.limit_estimate.converged);
}

TEST(FreeEnergy, TorusStripAgainstEtaOracle) {
  // det' on an a x b torus is a^2 |eta(i a/b)|^4; values frozen from a 30-digit evaluation.
  const std::vector<int> ns{1, 2, 3, 4, 6, 8};
  const std::vector<double> oracle{2.6210658518230190365, 2.9676394421029916912,  2.7313860305154683127,
                                   2.2595526502234349933, 0.97608776409521432217, -0.54294319339441914561};
  CoverSpec s;
  s.geometry = Geometry::torus_strip;
  s.L = 2 * kPi;
  s.L2 = 2 * kPi;
  const CoverFreeEnergySeq seq = free_energy_sequence(s, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    EXPECT_NEAR(seq.values_direct[i] * seq.volumes[i], oracle[i], 1e-9);
    EXPECT_NEAR(seq.values[i], seq.values_direct[i], 1e-6);
  }
  EXPECT_TRUE(seq.limit_estimate.converged);
  EXPECT_NEAR(seq.limit_estimate.value, -kPi / (3 * s.L2 * s.L2), 1e-8);
}

TEST(FreeEnergy, GraphCyclesFollowMatrixTree) {
  CoverSpec s;
  s.geometry = Geometry::graph;
  s.graph = spectra::cycle_base(3, 1);
  const CoverFreeEnergySeq seq = free_energy_sequence(s, {2, 3, 4, 6, 8, 12});
  for (std::size_t i = 0; i < seq.N_list.size(); ++i) {
    const double v = 3.0 * seq.N_list[i];
    // det' of the cycle Laplacian C_v is v times the v spanning trees.
    EXPECT_NEAR(seq.values[i], 2.0 * std::log(v) / v, 1e-10);
  }
  EXPECT_LT(seq.max_pair_difference, 1e-10);
}

TEST(FreeEnergy, RandomGraphDecompositionIdentity) {
  CoverSpec s;
  s.geometry = Geometry::graph;
  s.graph = spectra::random_base(6, 0.4, 11, 1);
  s.m = 0.3;
  const CoverFreeEnergySeq seq = free_energy_sequence(s, {2, 5, 9});
  EXPECT_LT(seq.max_pair_difference, 1e-10);
}

TEST(FreeEnergy, Preconditions) {
  EXPECT_THROW(free_energy_sequence(circle(1.0, 0.0), {4}), PreconditionError);
  EXPECT_THROW(free_energy_sequence(circle(1.0, 0.0), {4, 2}), PreconditionError);
  EXPECT_THROW(geometry_from_string("sphere"), PreconditionError);
}

TEST(Kato, CircleIsExactQuadratic) {
  const double L = 2.5;
  const Lambda0Curve c = lambda0_analysis(circle_family(L), symmetric_theta_grid(60));
  EXPECT_FALSE(c.flagged) << c.note;
  EXPECT_EQ(c.p, 1);
  EXPECT_NEAR(c.a, 1 / (L * L), 1e-12);
  EXPECT_NEAR(c.b, 1 / (L * L), 1e-12);
  EXPECT_NEAR(c.eps0, kPi * kPi / (2 * L * L), 1e-12);
  for (std::size_t i = 0; i < c.theta_grid.size(); ++i) {
    EXPECT_EQ(c.values[i], c.values[c.values.size() - 1 - i]);
    if (c.theta_grid[i] == 0.0) EXPECT_LT(c.values[i], 1e-12);
    else EXPECT_GT(c.values[i], 0.0);
  }
  EXPECT_NEAR(heat_bound_constant(c), std::sqrt(kPi) * L, 1e-12);
}

TEST(Kato, HexagonGraph) {
  const Lambda0Curve c = lambda0_analysis(graph_family(spectra::cycle_base(6, 1)), symmetric_theta_grid(60));
  EXPECT_FALSE(c.flagged) << c.note;
  EXPECT_EQ(c.p, 1);
  EXPECT_NEAR(c.a, 1.0 / 36.0, 1e-9);
  EXPECT_LE(c.b, c.a);
  EXPECT_GE(c.r2, 0.999);
  for (std::size_t i = 0; i < c.theta_grid.size(); ++i) {
    const double th = c.theta_grid[i];
    EXPECT_NEAR(c.values[i], 2 - 2 * std::cos(th / 6), 1e-12);
    if (std::abs(th) > 0 && std::abs(th) <= c.eta) EXPECT_LE(c.b * th * th, c.values[i] * (1 + 1e-12));
  }
}

TEST(Kato, MassiveFamilyIsFlagged) {
  const Lambda0Curve c = lambda0_analysis(circle_family(1.0, 0.5), symmetric_theta_grid(30));
  EXPECT_TRUE(c.flagged);
}

TEST(HeatBound, CircleCovers) {
  const double L = 2 * kPi;
  const Lambda0Curve c = lambda0_analysis(circle_family(L), symmetric_theta_grid(64));
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(std::pow(100.0, i / 40.0));
  std::vector<int> ns;
  for (int n = 1; n <= 64; ++n) ns.push_back(n);
  const HeatBoundReport r = small_eigen_heat_bound(circle_family(L), c, ts, ns);
  EXPECT_EQ(r.violations, 0);
  EXPECT_LE(r.max_violation, 0.0);
  EXPECT_NEAR(r.c4, std::sqrt(kPi) * L, 1e-12);

  // Sum-vs-integral oracle: with eps0 = pi^2 / (2 L^2) only twists |theta_p| < pi/sqrt(2)
  // contribute, and their normalized sum is below (1/2pi) times the Gaussian integral.
  for (int n : {8, 64})
    for (double t : {1.0, 10.0}) {
      double lhs = 0.0;
      for (int p = 1; p < n; ++p) {
        const double th = std::remainder(2 * kPi * p / n, 2 * kPi);
        const double lam = th * th / (L * L);
        if (lam < c.eps0) lhs += std::exp(-t * lam);
      }
      EXPECT_LE(lhs / n, L / std::sqrt(4 * kPi * t) + 1e-15);
    }
}

TEST(HeatBound, TriangleGraphCovers) {
  const auto fam = graph_family(spectra::cycle_base(3, 1));
  const Lambda0Curve c = lambda0_analysis(fam, symmetric_theta_grid(64));
  ASSERT_FALSE(c.flagged) << c.note;
  std::vector<double> ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(std::pow(50.0, i / 20.0));
  const HeatBoundReport r = small_eigen_heat_bound(fam, c, ts, {1, 2, 4, 8, 16, 32});
  EXPECT_EQ(r.violations, 0);
}

TEST(HeatBound, RejectsEpsAboveFloor) {
  Lambda0Curve c = lambda0_analysis(circle_family(1.0), symmetric_theta_grid(16));
  c.eps0 = 1e6;
  EXPECT_THROW(small_eigen_heat_bound(circle_family(1.0), c, {1.0}, {4}), PreconditionError);
}

TEST(Eigencount, CircleMatchesExplicitCount) {
  const double L = 2 * kPi;
  const Spectrum sp = spectra::twisted_circle_spectrum({L, 0.0, 0.0}, 40);
  for (double lam : {1.0, 4.0, 16.0, 64.0}) {
    const double count = 2 * std::floor(std::sqrt(lam) * L / (2 * kPi)) + 1;
    EXPECT_NEAR(eigencount_check(sp, L, {lam}, 1), count / (L * std::sqrt(lam)), 1e-15);
  }
  const Spectrum one = spectra::twisted_circle_spectrum({1.0, 0.0, 0.0}, 4);
  EXPECT_NEAR(eigencount_check(one, 1.0, {1.0}, 1), 1.0, 0.0);
  EXPECT_THROW(eigencount_check(sp, L, {0.5}, 1), PreconditionError);
}

TEST(Eigencount, UniformOverCovers) {
  std::vector<double> grid{1, 2, 4, 8, 16, 32, 64};
  for (int n = 1; n <= 32; ++n) {
    const double L = 2 * kPi * n;
    const Spectrum sp = spectra::twisted_circle_spectrum({L, 0.0, 0.0}, 20 * n);
    EXPECT_LE(eigencount_check(sp, L, grid, 1), flat_weyl_constant(1));
  }
  for (int n = 1; n <= 4; ++n) {
    const Spectrum sp = spectra::torus_spectrum(2 * kPi * n, 2 * kPi, 0.0, 20 * n);
    EXPECT_LE(eigencount_check(sp, 4 * kPi * kPi * n, grid, 2), flat_weyl_constant(2));
  }
}
