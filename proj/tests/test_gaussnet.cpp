#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"

using namespace speclab;
using namespace speclab::gaussnet;

namespace {

Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& a) { return a.inverse(); }

std::vector<int> random_subset(int n, int k, std::mt19937_64& rng) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(k);
  return v;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST(Dn, DecoupledVerticesGiveIdentity) {
  GaussianNetwork g = make_network(5, {}, 1.0);
  const DnResult r = dn_schur(g, {1, 3});
  EXPECT_EQ((r.dn - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(dn_schur(g, {}), PreconditionError);
}

TEST(Dn, PathOfThree) {
  const GaussianNetwork g = path_network(3, 1.0);
  const DnResult r = dn_schur(g, {0, 2});
  const Eigen::MatrixXd c = dense_inverse(g.Q);
  Eigen::Matrix2d block;
  block << c(0, 0), c(0, 2), c(2, 0), c(2, 2);
  EXPECT_LT((r.dn.inverse() - block).cwiseAbs().maxCoeff(), 1e-15);
  // Hand algebra: eliminating the middle vertex (diagonal 3) from diag(2, 2).
  EXPECT_NEAR(r.dn(0, 0), 2.0 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.dn(0, 1), -1.0 / 3.0, 1e-15);
}

TEST(Dn, AdditiveAcrossSides) {
  const GaussianNetwork g = mirror_grid(4, 2, 0.7);
  const auto& plus = g.regions.at("plus");
  const auto& minus = g.regions.at("minus");
  const auto& sigma = g.regions.at("sigma");
  auto one_side = [&](const std::vector<int>& side) {
    const Eigen::MatrixXd qii = submatrix(g.Q, side, side);
    const Eigen::MatrixXd qis = submatrix(g.Q, side, sigma);
    return Eigen::MatrixXd(-qis.transpose() * qii.inverse() * qis);
  };
  const Eigen::MatrixXd sum = submatrix(g.Q, sigma, sigma) + one_side(plus) + one_side(minus);
  EXPECT_LT((dn_schur(g, sigma).dn - sum).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Dn, SchurDualityOnRandomGraphs) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 56);
    const GaussianNetwork g = random_network(n, 3.0 / n, 1000 + trial, 0.5);
    const auto sigma = random_subset(n, 1 + static_cast<int>(rng() % (n / 2)), rng);
    EXPECT_LE(dn_schur(g, sigma).duality_residual, 1e-12) << "trial " << trial;
  }
}

TEST(Poisson, ZeroConstantAndEnergy) {
  const GaussianNetwork g = random_network(30, 0.1, 9, 1.0);
  const std::vector<int> sigma{0, 4, 9, 17};
  const PoissonResult zero = poisson_extend(g, sigma, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(zero.u.cwiseAbs().maxCoeff(), 0.0);

  const GaussianNetwork light = random_network(30, 0.1, 9, 1e-12);
  const PoissonResult flat = poisson_extend(light, sigma, Eigen::VectorXd::Constant(4, 2.5));
  EXPECT_LT((flat.u.array() - 2.5).abs().maxCoeff(), 1e-8);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianNetwork h = random_network(40, 0.08, 500 + trial, 0.3);
    const auto s = random_subset(40, 6, rng);
    Eigen::VectorXd f(6);
    for (int i = 0; i < 6; ++i) f(i) = nd(rng);
    const PoissonResult r = poisson_extend(h, s, f);
    EXPECT_LE(r.interior_residual, 1e-12);
    EXPECT_LE(r.energy_residual, 1e-10);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(r.u(s[i]), f(i));
  }
}

TEST(CnCd, TwoVertexHandAlgebra) {
  const double w = 1.7, m2 = 0.4;
  const GaussianNetwork g = make_network(2, {{0, 1, w}}, m2);
  const CnCdReport r = cn_minus_cd_check(g, {0}, {1});
  const double a = w + m2;
  const double dn = a - w * w / a;
  // PI = (w / a, 1); C_N - C_D = PI PI^T / dn.
  EXPECT_NEAR(r.cn(0, 0) - r.cd(0, 0), (w / a) * (w / a) / dn, 1e-15);
  EXPECT_NEAR(r.cn(0, 1), (w / a) / dn, 1e-15);
  EXPECT_NEAR(r.cn(1, 1), 1.0 / dn, 1e-15);
  EXPECT_LE(r.residual, 1e-15);
}

TEST(CnCd, RandomTreeWithLeafBoundary) {
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianNetwork g = random_network(25, 0.0, 77 + trial, 0.2);
    std::vector<int> deg(g.n, 0);
    for (const auto& e : g.edges) ++deg[e.u], ++deg[e.v];
    std::vector<int> leaves, inner;
    for (int v = 0; v < g.n; ++v) (deg[v] == 1 ? leaves : inner).push_back(v);
    const CnCdReport r = cn_minus_cd_check(g, inner, leaves);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_GE(r.min_eigenvalue, -1e-12);
  }
}

TEST(CnCd, MonotoneOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianNetwork g = random_mirror_network(3 + trial % 25, 1 + trial % 5, 0.2, 300 + trial, 0.5);
    for (Closure cl : {Closure::subgraph, Closure::half_weight}) {
      const CnCdReport r = cn_minus_cd_check(g, g.regions.at("plus"), g.regions.at("sigma"), cl);
      EXPECT_LE(r.residual, 1e-12);
      EXPECT_GE(r.min_eigenvalue, -1e-12);
    }
  }
}

TEST(CnCd, RejectsLeakyRegionAndIsolatedBoundary) {
  const GaussianNetwork g = path_network(4, 1.0);
  EXPECT_THROW(cn_minus_cd_check(g, {1}, {0}), PreconditionError);
  // Vertex 2 has no edges; a tiny mass keeps Q invertible, then it is removed
  // so the subgraph closure at vertex 2 is singular.
  GaussianNetwork h = make_network(3, {{0, 1, 1.0}}, 1.0);
  h.mass2(2) = 0.0;
  EXPECT_THROW(cn_minus_cd_check(h, {0, 1}, {2}), PreconditionError);
}

TEST(Markov, ChainCutAtTwoVertices) {
  const GaussianNetwork g = path_network(12, 0.6);
  const MarkovReport r = markov_bayes_check(g, {4}, {8});
  EXPECT_LE(r.cross_covariance, 1e-12);
  EXPECT_LE(r.split_residual, 1e-12);
  EXPECT_LE(r.bayes_residual, 1e-12);
  EXPECT_LE(r.markov_residual, 1e-12);
  EXPECT_EQ(r.components, 2);
}

TEST(Markov, GridMiddleColumnAndDegenerateCase) {
  const GaussianNetwork g = grid_network(5, 5, 0.5);
  std::vector<int> middle;
  for (int r = 0; r < 5; ++r) middle.push_back(r * 5 + 2);
  const MarkovReport rep = markov_bayes_check(g, middle, {});
  EXPECT_LE(rep.markov_residual, 1e-12);
  EXPECT_LE(rep.split_residual, 1e-12);
  EXPECT_LE(rep.cross_covariance, 1e-12);
  EXPECT_EQ(rep.bayes_residual, 0.0);
  EXPECT_THROW(markov_bayes_check(g, {0}, {}), PreconditionError);
}

TEST(Markov, RandomMirrorNetworks) {
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianNetwork g = random_mirror_network(4 + trial % 20, 1 + trial % 6, 0.2, 900 + trial, 0.4);
    const auto& plus = g.regions.at("plus");
    const MarkovReport r = markov_bayes_check(g, g.regions.at("sigma"), {plus.front()});
    EXPECT_LE(r.cross_covariance, 1e-12);
    EXPECT_LE(r.split_residual, 1e-12);
    EXPECT_LE(r.bayes_residual, 1e-10);
    EXPECT_LE(r.markov_residual, 1e-12);
  }
}

TEST(Rp, SigmaSupportedVector) {
  const GaussianNetwork g = mirror_path(4, 0.5);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.n, 1);
  f(g.regions.at("sigma")[0], 0) = 1.3;
  const RpReport r = rp_gram(g, f);
  EXPECT_NEAR(r.min_eigenvalue, 1.69 * g.covariance()(4, 4), 1e-15);
  EXPECT_LE(r.identity_residual, 1e-12);
}

TEST(Rp, MirrorPathIdentityNeedsHalfClosure) {
  const GaussianNetwork g = mirror_path(6, 0.5);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.n, 5);
  for (int k = 0; k < 5; ++k)
    for (int v : g.regions.at("plus")) f(v, k) = nd(rng);
  EXPECT_LE(rp_gram(g, f, Closure::half_weight).identity_residual, 1e-12);
  EXPECT_GT(rp_gram(g, f, Closure::subgraph).identity_residual, 1e-6);
}

TEST(Rp, GramPositiveOnMirrorGrid) {
  const GaussianNetwork g = mirror_grid(5, 3, 0.3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.n, 100);
  for (int k = 0; k < 100; ++k) {
    for (int v : g.regions.at("plus")) f(v, k) = nd(rng);
    for (int v : g.regions.at("sigma")) f(v, k) = nd(rng);
  }
  const RpReport r = rp_gram(g, f);
  EXPECT_GE(r.min_eigenvalue, -1e-12);
  EXPECT_LE(r.identity_residual, 1e-12);
  f(g.regions.at("minus")[0], 3) = 1.0;
  EXPECT_THROW(rp_gram(g, f), PreconditionError);
}

TEST(Wick, PairingCounts) {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  EXPECT_EQ(wick_product_expectation(one, {4}, false), 3.0);
  EXPECT_EQ(wick_product_expectation(one, {12}, false), 10395.0);
  EXPECT_EQ(wick_product_expectation(one, {7}, false), 0.0);
  EXPECT_THROW(wick_product_expectation(one, {14}, false), PreconditionError);
  // A Wick power has mean zero.
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(wick_product_expectation(one, {n}, true), 0.0);
}

TEST(Wick, OrthogonalityLawExact) {
  for (double rho : {0.5, -0.375, 0.8125}) {
    Eigen::Matrix2d c;
    c << 1.0, rho, rho, 1.0;
    for (int n = 0; n <= 12; ++n)
      for (int m = 0; n + m <= 12; ++m) {
        const double v = wick_product_expectation(c, {n, m}, true);
        const double law = (n == m) ? factorial(n) * std::pow(rho, n) : 0.0;
        EXPECT_EQ(v, law) << n << "," << m;
      }
  }
  Eigen::Matrix2d c;
  c << 1.0, 0.5, 0.5, 1.0;
  EXPECT_EQ(wick_product_expectation(c, {2, 2}, true), 2 * 0.25);
}

TEST(Wick, HermiteRouteAgrees) {
  Eigen::Matrix3d c;
  c << 1.3, 0.4, -0.2, 0.4, 0.9, 0.3, -0.2, 0.3, 1.1;
  for (const std::vector<int>& p : {std::vector<int>{2, 2, 0}, {3, 1, 2}, {4, 4, 2}, {1, 1, 2}, {3, 3, 0}})
    EXPECT_NEAR(wick_expectation_hermite(c, p), wick_product_expectation(c, p, true), 1e-10);
}

TEST(Wick, MonteCarloThirdPower) {
  const double rho = 0.6;
  Eigen::Matrix2d c;
  c << 1.0, rho, rho, 1.0;
  const MonteCarlo mc = wick_monte_carlo(c, {3, 3}, true, 1000000, 31);
  EXPECT_LT(std::abs(mc.mean - 6 * rho * rho * rho), 3 * mc.stderr_);
  const MonteCarlo serial = wick_monte_carlo(c, {3, 3}, true, 20000, 8, false);
  const MonteCarlo para = wick_monte_carlo(c, {3, 3}, true, 20000, 8, true);
  EXPECT_EQ(serial.mean, para.mean);
}

TEST(Wick, SampleCovariance) {
  const GaussianNetwork g = path_network(4, 1.0);
  const Eigen::MatrixXd s = sample_gaussian(g.Q, 200000, 17);
  const Eigen::MatrixXd emp = s.transpose() * s / 200000.0;
  const Eigen::MatrixXd c = g.covariance();
  // Entry standard error is at most sqrt(2) max C_ii / sqrt(n).
  EXPECT_LT((emp - c).cwiseAbs().maxCoeff(), 4 * std::sqrt(2.0) * c.diagonal().maxCoeff() / std::sqrt(200000.0));
  EXPECT_EQ(s, sample_gaussian(g.Q, 200000, 17));
}

TEST(Interaction, WickMonomialsAreCentred) {
  GaussianNetwork c8 = make_network(8, {}, 1.0);
  for (int i = 0; i < 8; ++i) c8.edges.push_back({i, (i + 1) % 8, 1.0});
  c8.assemble();
  const InteractionStats s2 = wick_interaction(c8, {0, 0, 1.0}, 200000, 3);
  EXPECT_LT(std::abs(s2.action.mean), 3 * s2.action.stderr_);
  const InteractionStats s4 = wick_interaction(c8, {0, 0, 0, 0, 1.0}, 1000000, 4);
  EXPECT_LT(std::abs(s4.action.mean), 3 * s4.action.stderr_);
  EXPECT_FALSE(s4.flagged);
}

TEST(Interaction, QuadraticPerturbationMatchesDeterminant) {
  const GaussianNetwork g = random_network(10, 0.3, 21, 1.0);
  const double gcoef = 0.1;
  const InteractionStats st = wick_interaction(g, {0, 0, gcoef}, 1000000, 5);
  const double exact = quadratic_perturbation_exact(g, gcoef);
  EXPECT_LT(std::abs(st.boltzmann.mean - exact), 3 * st.boltzmann.stderr_) << st.boltzmann.mean << " " << exact;
}

TEST(Amplitude, IntervalsDoubleEndToEnd) {
  const BoundaryNetwork a = interval_network(5, 0.8);
  const ComposeReport r = amplitude_compose(a, a);
  EXPECT_LE(r.quadratic_residual, 1e-10);
  EXPECT_LE(r.normalization_residual, 1e-10);
  const GaussianKernel composed = compose(boundary_kernel(a), boundary_kernel(a));
  const GaussianKernel direct = boundary_kernel(interval_network(9, 0.8));
  EXPECT_LT((composed.M - direct.M).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(composed.log_norm, direct.log_norm, 1e-12);
}

TEST(Amplitude, MirrorGluingIsTraceOfSquare) {
  const GaussianNetwork full = random_mirror_network(7, 3, 0.3, 42, 0.6);
  const auto& plus = full.regions.at("plus");
  const auto& sigma = full.regions.at("sigma");
  // Half network: plus u sigma with sigma edges and masses halved.
  std::vector<int> verts = plus;
  verts.insert(verts.end(), sigma.begin(), sigma.end());
  std::vector<int> where(full.n, -1);
  for (std::size_t i = 0; i < verts.size(); ++i) where[verts[i]] = static_cast<int>(i);
  BoundaryNetwork half;
  half.net.n = static_cast<int>(verts.size());
  half.net.mass2 = Eigen::VectorXd(half.net.n);
  for (std::size_t i = 0; i < verts.size(); ++i)
    half.net.mass2(i) = full.mass2(verts[i]) * (i < plus.size() ? 1.0 : 0.5);
  for (const auto& e : full.edges) {
    const int a = where[e.u], b = where[e.v];
    if (a < 0 || b < 0) continue;
    const bool both_sigma = a >= static_cast<int>(plus.size()) && b >= static_cast<int>(plus.size());
    half.net.edges.push_back({a, b, both_sigma ? 0.5 * e.w : e.w});
  }
  half.net.assemble();
  for (std::size_t i = plus.size(); i < verts.size(); ++i) half.out.push_back(static_cast<int>(i));
  BoundaryNetwork mirror = half;
  mirror.in = mirror.out;
  mirror.out.clear();
  const GaussianKernel z = compose(boundary_kernel(mirror), boundary_kernel(half));
  EXPECT_EQ(z.n_out + z.n_in, 0);
  EXPECT_NEAR(z.log_norm, log_partition(full.Q), 1e-10);
  const ComposeReport r = amplitude_compose(mirror, half);
  EXPECT_LE(r.normalization_residual, 1e-10);
}

TEST(Amplitude, IdentityAndMismatch) {
  const BoundaryNetwork a = interval_network(4, 1.0);
  const GaussianKernel k = boundary_kernel(a);
  const GaussianKernel same = compose(identity_kernel(1), k);
  EXPECT_EQ(same.M, k.M);
  EXPECT_EQ(same.log_norm, k.log_norm);
  BoundaryNetwork two = interval_network(4, 1.0);
  two.in = {0, 1};
  EXPECT_THROW(amplitude_compose(two, a), PreconditionError);
}

TEST(Amplitude, RandomGluings) {
  for (int trial = 0; trial < 100; ++trial) {
    BoundaryNetwork b1, b2;
    b1.net = random_network(6 + trial % 30, 0.15, 2000 + trial, 0.5);
    b2.net = random_network(6 + (trial * 7) % 30, 0.15, 5000 + trial, 0.5);
    const int s = 1 + trial % 4;
    for (int i = 0; i < s; ++i) {
      b1.out.push_back(i);
      b2.in.push_back(b2.net.n - 1 - i);
    }
    b1.in = {b1.net.n - 1};
    b2.out = {0};
    const ComposeReport r = amplitude_compose(b2, b1);
    EXPECT_LE(r.quadratic_residual, 1e-10);
    EXPECT_LE(r.normalization_residual, 1e-10);
  }
}
