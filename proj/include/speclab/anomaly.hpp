#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "speclab/numerics.hpp"

namespace speclab::anomaly {

using V3 = Eigen::Vector3d;

// Inverse stereographic projection; z = 0 is the south pole (0, 0, -1). The
// Fubini-Study metric 4(1+|z|^2)^{-2}|dz|^2 is the round metric of the unit sphere.
V3 from_complex(std::complex<double> z);
V3 infinity_point();

struct Monomial {
  double c = 0.0;
  int a = 0, b = 0, e = 0;  // c x^a y^b z^e
};

// Real function on the unit sphere with analytic tangential gradient and
// Laplace-Beltrami operator for the round metric.
class Field {
 public:
  static Field zero();
  static Field constant(double c);
  static Field polynomial(std::vector<Monomial> terms);
  // gamma * log |x - p| (chordal distance).
  static Field log_distance(const V3& p, double gamma);
  // f(x . n) with derivatives f', f''.
  static Field zonal(const V3& n, std::function<double(double)> f, std::function<double(double)> df,
                     std::function<double(double)> d2f);
  // A random polynomial of the given degree with coefficients in [-scale, scale].
  static Field random_polynomial(int degree, double scale, unsigned seed);

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field operator*(double s) const;

  double value(const V3& x) const;
  V3 gradient(const V3& x) const;  // tangential
  double laplacian(const V3& x) const;
  bool empty() const { return parts_.empty(); }

 private:
  struct Poly {
    std::vector<Monomial> terms;
  };
  struct LogDist {
    V3 p;
    double gamma;
  };
  struct Zonal {
    V3 n;
    std::function<double(double)> f, df, d2f;
  };
  using Part = std::variant<Poly, LogDist, Zonal>;
  std::vector<std::pair<double, Part>> parts_;
};

// Gauss-Legendre in cos(theta) times the periodic trapezoid in azimuth.
struct SphereGrid {
  std::vector<V3> nodes;
  std::vector<double> weights;
};
SphereGrid sphere_grid(int n_theta);
double integrate(const SphereGrid& g, const std::function<double(const V3&)>& f);
double integrate_serial(const SphereGrid& g, const std::function<double(const V3&)>& f);

struct AnomalyValue {
  double value = 0.0;
  double quadrature_error = 0.0;
  std::optional<numerics::ExtrapolationResult> epsilon_extrapolation;
  std::vector<double> eps;
  std::vector<double> ra_eps;   // with the counterterm
  std::vector<double> raw_eps;  // without it
};

// (1/24 pi) int (|grad_g sigma|^2 + 2 K_g sigma) dV_g for g = e^{2w} g_round; sigma is relative to g.
AnomalyValue anomaly_smooth(const Field& sigma, const Field& reference = Field::zero(), int resolution = 48);

struct DivisorPoint {
  V3 p;
  double gamma = 0.0;
};

// g~ = e^{2 sigma} g_round, with sigma = sum_j gamma_j log d(., p_j) + regular. Here sigma is
// relative to the round metric, whatever the reference.
// The reference metric is g = e^{2 w} g_round with w = `reference`.
struct ConicalSurfaceData {
  std::vector<DivisorPoint> divisor;
  Field sigma;
  Field reference;
};

// sigma of the pullback of the round metric under z -> z^d, with divisor
// {(0, d-1), (infinity, d-1)}.
ConicalSurfaceData pullback_zd(int d);
// A single cone point: sigma = gamma log |x - p|.
ConicalSurfaceData single_cone(const V3& p, double gamma);

struct RaOptions {
  int sphere_n = 192;  // coarse global grid; the error estimate doubles it
  int angles = 48;
  int gl = 20;
  double chart_radius = 0.0;  // 0: half the smallest divisor separation, at most 1
};

// Six eps values whose cut radii fall geometrically from 0.09 (in the round metric).
std::vector<double> default_eps_ladder(const ConicalSurfaceData& data);
double counterterm_coefficient(const ConicalSurfaceData& data);  // 2 pi sum gamma^2 / (1 + gamma)

AnomalyValue anomaly_renormalized(const ConicalSurfaceData& data, const std::vector<double>& eps,
                                  const RaOptions& opt = {});

// Anomaly of e^{2h} g~ relative to g~ via the smooth rewrite
// (1/24 pi) int (|grad h|^2 + 2 (K_g - Delta_g sigma) h) dV_g.
AnomalyValue anomaly_regular_conical(const Field& h, const ConicalSurfaceData& data, int resolution = 48);
// int K_g~ dV_g~ over the smooth part, by quadrature of (K_g - Delta_g sigma) dV_g.
double conical_curvature_integral(const ConicalSurfaceData& data, int resolution = 48);

struct ScalingReport {
  double residual = 0.0;
  double ra_scaled = 0.0;
  double ra_base = 0.0;
  double regular = 0.0;
  double correction = 0.0;  // (1/12) sum gamma (gamma + 2)/(gamma + 1) h(z_j)
  bool converged = false;
};

ScalingReport conical_scaling_check(const ConicalSurfaceData& data, const Field& h, const std::vector<double>& eps,
                                    const RaOptions& opt = {});

struct CountertermFit {
  double slope = 0.0;      // log eps coefficient of the uncorrected ladder, remainder terms fitted alongside
  double predicted = 0.0;  // -(1/12) sum gamma^2 / (1 + gamma)
  double relative_error = 0.0;
};

CountertermFit counterterm_slope(const ConicalSurfaceData& data, const std::vector<double>& eps,
                                 const RaOptions& opt = {});

// int_0^r rho^gamma e^{phi(rho)} d rho by graded Gauss-Legendre in u = rho^{gamma+1}.
double radial_distance(const std::function<double(double)>& phi, double gamma, double r);

struct RadialDistance {
  std::vector<double> r;
  std::vector<double> distance;
  double leading_coefficient = 0.0;   // fitted lim distance / r^{gamma+1}
  double predicted_coefficient = 0.0; // e^{phi(0)} / (gamma + 1)
  double relative_error = 0.0;
};

RadialDistance cone_radial_distance_profile(const std::function<double(double)>& phi, double gamma,
                                            const std::vector<double>& r_grid);
// Along the geodesic from divisor point j at angle alpha.
RadialDistance cone_radial_distance(const ConicalSurfaceData& data, int j, const std::vector<double>& r_grid,
                                    double alpha = 0.0);

// lim_{rho -> 0} sigma - gamma_j log rho at divisor point j, rho the geodesic distance.
double regular_value_at(const ConicalSurfaceData& data, int j);
// Fitted exponent k in phi(rho, alpha) - phi(0) = O(rho^k) along a few rays.
double regular_decay_exponent(const ConicalSurfaceData& data, int j);

struct AsymptoticCheck {
  std::vector<double> delta;
  std::vector<double> values;
  std::vector<double> predicted;
  std::vector<double> differences;
  double rate = 0.0;  // fitted exponent of |difference| in delta
  double limit = 0.0;
  double limit_error = 0.0;
  double predicted_limit = 0.0;
  bool flagged = false;
};

// int over delta < rho < Q delta around point j of |grad sigma|^2, against 2 pi gamma^2 log Q.
AsymptoticCheck annulus_check(const ConicalSurfaceData& data, int j, double Q, const std::vector<double>& deltas);
// int over S minus the delta-disk at point j of (grad h . grad sigma + h Delta sigma), against
// -2 pi sum_i gamma_i h(z_i). The other divisor points keep a negligible cut.
AsymptoticCheck green_stokes_check(const ConicalSurfaceData& data, int j, const Field& h,
                                   const std::vector<double>& deltas);
// int over S minus the delta-disks of |grad sigma|^2, against
// -int sigma Delta sigma - sum_j (2 pi gamma_j^2 log delta + 2 pi gamma_j phi_j).
AsymptoticCheck basic_renorm_check(const ConicalSurfaceData& data, const std::vector<double>& deltas);

// ---- branched covers and entropies ------------------------------------------

// fibers[k] lists the ramification orders of the preimages of critical value k.
std::vector<double> branched_weights(int degree, const std::vector<std::vector<int>>& fibers, double c);
double weight_zd(int d, double c);  // (c/12)(d - 1/d)
double renyi_exponent(double d, double c);  // -(c/6)(d - 1/d)

struct Renyi {
  double trace = 0.0;    // tr rho_A^d
  double entropy = 0.0;  // log(trace) / (1 - d)
  double exponent = 0.0;
};

Renyi renyi_entropy(double L, double ell, int d, double c, double C);
// C sin(d_FS / 2)^{-2 Delta}.
double two_point(double d_fs, double Delta, double C);

}  // namespace speclab::anomaly
