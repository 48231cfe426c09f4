#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/rpwitness.hpp"

namespace speclab::rpwitness {

namespace {

constexpr double kPi = std::numbers::pi;

double cubic_bspline(double u) {
  if (u < 0.0 || u >= 4.0) return 0.0;
  if (u < 1.0) return u * u * u / 6.0;
  if (u < 2.0) return (-3.0 * u * u * u + 12.0 * u * u - 12.0 * u + 4.0) / 6.0;
  if (u < 3.0) return (3.0 * u * u * u - 24.0 * u * u + 60.0 * u - 44.0) / 6.0;
  const double v = 4.0 - u;
  return v * v * v / 6.0;
}

double knot_step(int m, double margin) { return (kPi - 2.0 * margin) / (m + 3); }

// Orthonormal circle modes: constant, then cos k, sin k for k = 1..K.
double mode(int i, double theta) {
  if (i == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const int k = (i + 1) / 2;
  return (i % 2 ? std::cos(k * theta) : std::sin(k * theta)) / std::sqrt(kPi);
}

// Gauss-Legendre nodes on every knot span of [margin, pi - margin].
numerics::QuadratureRule span_rule(int m, double margin) {
  std::vector<double> edges;
  const double h = knot_step(m, margin);
  for (int k = 0; k <= m + 3; ++k) edges.push_back(margin + k * h);
  return numerics::composite_legendre(edges, 10);
}

Eigen::MatrixXd moment_matrix(int m, double margin, int K) {
  const auto rule = span_rule(m, margin);
  const double h = knot_step(m, margin);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * K + 1, m);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double th = rule.nodes[q];
    const double u = (th - margin) / h;
    const int first = std::max(0, static_cast<int>(std::floor(u)) - 3);
    const int last = std::min(m - 1, static_cast<int>(std::floor(u)));
    for (int j = first; j <= last; ++j) {
      const double b = cubic_bspline(u - j);
      if (b == 0.0) continue;
      for (int i = 0; i <= 2 * K; ++i) G(i, j) += rule.weights[q] * b * mode(i, th);
    }
  }
  return G;
}

}  // namespace

double largest_odd_eigenvalue(double Lambda) {
  require(Lambda >= 1.0, "no odd eigenfunction below Lambda: need Lambda >= 1");
  const double k = std::floor(std::sqrt(Lambda) + 1e-12);
  return k * k;
}

double compact_function(const std::vector<double>& coefficients, double margin, double theta) {
  const int m = static_cast<int>(coefficients.size());
  const double u = (theta - margin) / knot_step(m, margin);
  double acc = 0.0;
  for (int j = 0; j < m; ++j) acc += coefficients[static_cast<std::size_t>(j)] * cubic_bspline(u - j);
  return acc;
}

std::vector<double> compact_moments(const std::vector<double>& coefficients, double margin, int K) {
  const int m = static_cast<int>(coefficients.size());
  require(m >= 1, "compact_moments: empty coefficient vector");
  const Eigen::MatrixXd G = moment_matrix(m, margin, K);
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coefficients.data(), m);
  const Eigen::VectorXd mom = G * c;
  return {mom.data(), mom.data() + mom.size()};
}

WitnessCertificate compact_witness(double Lambda, const CompactOptions& opt) {
  const double lstar = largest_odd_eigenvalue(Lambda);
  require(opt.margin > 0.0 && opt.margin < 0.5 * kPi, "compact_witness: margin must lie in (0, pi/2)");
  const int K = static_cast<int>(std::round(std::sqrt(lstar)));
  const int constraints = 2 * K + 1;
  Eigen::VectorXd target = Eigen::VectorXd::Zero(constraints);
  target[2 * K] = 1.0;  // <f, sin(K theta)/sqrt(pi)> = 1, every other moment 0

  WitnessCertificate c;
  c.construction = Construction::compact_dual;
  c.parameters["Lambda"] = Lambda;
  c.parameters["lambda_star"] = lstar;
  c.parameters["margin"] = opt.margin;

  int m = constraints + opt.extra_basis;
  for (int attempt = 0; attempt <= opt.max_doublings; ++attempt, m *= 2) {
    const Eigen::MatrixXd G = moment_matrix(m, opt.margin, K);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] < 1e-12 * sv[0]) continue;
    const Eigen::VectorXd coef = G.completeOrthogonalDecomposition().solve(target);
    const double residual = (G * coef - target).norm();
    if (residual > 1e-12) continue;
    c.coefficients.assign(coef.data(), coef.data() + coef.size());
    c.parameters["basis_size"] = m;
    c.parameters["moment_residual"] = residual;
    c.pairing_value = reevaluate(c);
    c.tolerance = 10.0 * residual + 1e-14;
    c.negative = c.pairing_value < -c.tolerance;
    // Uncut pairing with the circle resolvent kernel cosh(pi - d) / (2 sinh pi).
    const auto rule = span_rule(m, opt.margin);
    double ch = 0.0, sh = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double th = rule.nodes[q];
      const double f = compact_function(c.coefficients, opt.margin, th);
      ch += rule.weights[q] * f * std::cosh(0.5 * kPi - th);
      sh += rule.weights[q] * f * std::sinh(0.5 * kPi - th);
    }
    c.uncut_value = (ch * ch + sh * sh) / (2.0 * std::sinh(kPi));
    return c;
  }
  throw NumericalError("compact_witness: moment system rank-deficient for every basis size tried");
}

}  // namespace speclab::rpwitness
