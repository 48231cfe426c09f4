#include <cmath>
#include <numbers>

#include "speclab/anomaly.hpp"
#include "speclab/error.hpp"

namespace speclab::anomaly {

std::vector<double> branched_weights(int degree, const std::vector<std::vector<int>>& fibers, double c) {
  require(degree >= 1, "branched_weights: degree must be positive");
  std::vector<double> out;
  for (const auto& fiber : fibers) {
    int total = 0;
    double w = 0.0;
    for (int e : fiber) {
      require(e >= 1, "branched_weights: ramification orders must be at least 1");
      total += e;
      w += e - 1.0 / e;
    }
    require(total == degree, "branched_weights: orders over a critical value must sum to the degree");
    out.push_back(c / 12.0 * w);
  }
  return out;
}

double weight_zd(int d, double c) { return branched_weights(d, {{d}}, c).front(); }

double renyi_exponent(double d, double c) { return -(c / 6.0) * (d - 1.0 / d); }

Renyi renyi_entropy(double L, double ell, int d, double c, double C) {
  require(L > 0.0 && ell > 0.0 && ell < L, "renyi_entropy: need 0 < ell < L");
  require(d >= 2, "renyi_entropy: d must be an integer >= 2");
  require(C > 0.0, "renyi_entropy: C must be positive");
  Renyi r;
  r.exponent = renyi_exponent(d, c);
  const double base = L / std::numbers::pi * std::sin(std::numbers::pi * ell / L);
  r.trace = C * std::pow(base, r.exponent);
  r.entropy = std::log(r.trace) / (1.0 - d);
  return r;
}

double two_point(double d_fs, double Delta, double C) {
  require(d_fs > 0.0 && d_fs <= std::numbers::pi, "two_point: distance must lie in (0, pi]");
  return C * std::pow(std::sin(0.5 * d_fs), -2.0 * Delta);
}

}  // namespace speclab::anomaly
