#pragma once

// Geodesic polar charts around divisor points, shared by the anomaly sources.

#include <functional>
#include <vector>

#include "speclab/anomaly.hpp"

namespace speclab::anomaly::detail {

struct PolarFrame {
  V3 p, e1, e2;
  explicit PolarFrame(const V3& centre);
  V3 point(double rho, double alpha) const;
};

// Largest usable chart radius: half the smallest geodesic separation, capped at 1.
double chart_radius(const ConicalSurfaceData& data, double requested);

// Smooth cutoff: 1 on [0, R/2], 0 beyond R.
double bump(double rho, double R);
// 1 - sum_j bump(dist(x, p_j), R).
double outer_weight(const ConicalSurfaceData& data, const V3& x, double R);

// sigma(x(rho, alpha)) - gamma log rho along a ray.
std::function<double(double)> ray_potential(const Field& sigma, const PolarFrame& f, double gamma, double alpha);

// Radius along the ray at which the e^{sigma}-length reaches eps.
double cut_radius(const Field& sigma, const PolarFrame& f, double gamma, double alpha, double eps);

struct PolarRule {
  int angles = 48;
  int gl = 16;
};

// int_0^{2 pi} d alpha int_{lo(alpha)}^{hi} w(rho) F(x) sin(rho) d rho, integrated in log rho.
// With R > 0 the weight is bump(rho, R); otherwise 1.
double polar_integral(const PolarFrame& f, const std::function<double(const V3&)>& F,
                      const std::vector<double>& lo, double hi, double R, const PolarRule& rule);

inline constexpr double kInnerRadius = 1e-12;

}  // namespace speclab::anomaly::detail
