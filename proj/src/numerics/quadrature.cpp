#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"

namespace speclab::numerics {

QuadratureRule gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: n must be positive");
  require(a < b, "gauss_legendre: need a < b");
  QuadratureRule r;
  r.kind = RuleKind::legendre;
  r.a = a;
  r.b = b;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Nodes ascending: index i holds the negative root.
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = half * w;
    r.weights[n - 1 - i] = half * w;
  }
  return r;
}

QuadratureRule gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: n must be positive");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite family.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  QuadratureRule r;
  r.kind = RuleKind::hermite_weighted;
  r.a = -INFINITY;
  r.b = INFINITY;
  const double mass = std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(es.eigenvalues()(i));
    const double v0 = es.eigenvectors()(0, i);
    r.weights.push_back(mass * v0 * v0);
  }
  return r;
}

QuadratureRule periodic_trapezoid(int n, double a, double b) {
  require(n >= 1, "periodic_trapezoid: n must be positive");
  require(a < b, "periodic_trapezoid: need a < b");
  QuadratureRule r;
  r.kind = RuleKind::periodic_trapezoid;
  r.a = a;
  r.b = b;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(a + (i + 0.5) * h);
    r.weights.push_back(h);
  }
  return r;
}

QuadratureRule composite_legendre(const std::vector<double>& edges, int per_panel) {
  require(edges.size() >= 2, "composite_legendre: need at least one panel");
  QuadratureRule r;
  r.kind = RuleKind::legendre;
  r.a = edges.front();
  r.b = edges.back();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const QuadratureRule g = gauss_legendre(per_panel, edges[p], edges[p + 1]);
    r.nodes.insert(r.nodes.end(), g.nodes.begin(), g.nodes.end());
    r.weights.insert(r.weights.end(), g.weights.begin(), g.weights.end());
  }
  return r;
}

}  // namespace speclab::numerics
