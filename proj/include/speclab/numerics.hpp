#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "speclab/spectrum.hpp"

namespace speclab::numerics {

enum class RuleKind { legendre, hermite_weighted, periodic_trapezoid };

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind = RuleKind::legendre;
  // Integration interval. For hermite_weighted both ends are infinite.
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

QuadratureRule gauss_legendre(int n, double a, double b);
// Nodes for the weight exp(-x^2/2); weights sum to sqrt(2 pi).
QuadratureRule gauss_hermite(int n);
// Midpoint trapezoid rule for periodic integrands on [a, b).
QuadratureRule periodic_trapezoid(int n, double a, double b);
// Composite Gauss-Legendre over the panel boundaries `edges`.
QuadratureRule composite_legendre(const std::vector<double>& edges, int per_panel);

// Probabilists' Hermite polynomial He_n(x).
double hermite_poly(int n, double x);

// Hurwitz-type sum  sum_{n>=0} (n + shift)^{-s}, continued to all s != 1 by
// summing `direct_terms` terms and closing with an order-4 Euler-Maclaurin tail.
// direct_terms <= 0 picks a count adapted to |s|.
std::complex<double> lerch_sum(std::complex<double> s, double shift, int direct_terms = 0);
double lerch_sum(double s, double shift, int direct_terms = 0);
// d/ds of the Hurwitz sum at s = 0.
double hurwitz_deriv_at_zero(double shift);

struct ExtrapolationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<int> orders_used;
  bool converged = false;
  std::vector<double> stage_values;
};

// Repeated Richardson elimination of h^order, h^(order+1), ...
// Samples must have strictly decreasing h (at least 3).
ExtrapolationResult richardson(const std::vector<std::pair<double, double>>& samples, int order);

// Limit of v(h) = v0 + sum_j c_j basis_j(h) using the smallest-h samples.
// Stage k fits the first k basis functions on the k + 1 smallest h; the
// error estimate is the difference of the last two stages.
ExtrapolationResult extrapolate_model(const std::vector<std::pair<double, double>>& samples,
                                      const std::vector<std::function<double(double)>>& basis);

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

Spectrum sym_eig(const Eigen::MatrixXd& a);
EigenPairs sym_eig_pairs(const Eigen::MatrixXd& a);
// Ascending eigenvalues of a Hermitian matrix.
Eigen::VectorXd herm_eigenvalues(const Eigen::MatrixXcd& a);

}  // namespace speclab::numerics
