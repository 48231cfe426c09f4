#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "speclab/numerics.hpp"
#include "speclab/spectra.hpp"
#include "speclab/spectrum.hpp"

namespace speclab::covers {

// Heat trace of the N-fold cover of a circle of length L, computed as an
// eigenvalue sum and as a sum over deck translates of the line heat kernel.
struct HeatTracePair {
  double eigen_sum = 0.0;
  double deck_sum = 0.0;
  double difference = 0.0;
};

HeatTracePair heat_trace_cover(double L, int N, double t);
double heat_trace_eigen_sum_serial(double L, int N, double t);

enum class Geometry { circle, torus_strip, graph };
std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

struct CoverSpec {
  Geometry geometry = Geometry::circle;
  double m = 0.0;
  double L = 1.0;               // circle length, or L1 for the torus strip
  double L2 = 2.0 * 3.14159265358979323846;  // torus strip transverse length
  spectra::CoverGraph graph;    // used when geometry == graph (N is ignored)
};

struct CoverFreeEnergySeq {
  std::vector<int> N_list;
  std::vector<double> values;         // from the twisted-block products
  std::vector<double> values_direct;  // from the cover spectrum itself
  std::vector<double> volumes;
  double max_pair_difference = 0.0;
  numerics::ExtrapolationResult limit_estimate;
};

// log det' of the twisted base operator at twist theta (kernel excluded).
double twisted_log_det(const CoverSpec& spec, double theta);
// log det' of the N-fold cover, computed without using the twist decomposition.
double cover_log_det_direct(const CoverSpec& spec, int N);
double base_volume(const CoverSpec& spec);

CoverFreeEnergySeq free_energy_sequence(const CoverSpec& spec, const std::vector<int>& N_list);

// Lowest eigenvalues (ascending, at least two) of a one-parameter twisted family.
using TwistedFamily = std::function<Eigen::VectorXd(double theta)>;
TwistedFamily circle_family(double L, double m = 0.0);
TwistedFamily graph_family(const spectra::CoverGraph& g, double m = 0.0);

struct Lambda0Curve {
  std::vector<double> theta_grid;
  std::vector<double> values;   // lambda_0(theta)
  std::vector<double> lambda1;  // lambda_1(theta)
  int p = 0;
  double slope = 0.0;  // fitted log-log slope, about 2p
  double r2 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double eta = 0.3;
  double eps0 = 0.0;  // half the smallest lambda_1 on the grid
  bool flagged = false;
  std::string note;
};

// theta_grid must be symmetric about 0 and contain 0.
Lambda0Curve lambda0_analysis(const TwistedFamily& family, const std::vector<double>& theta_grid, double eta = 0.3);
std::vector<double> symmetric_theta_grid(int half_points);

// C4 = Gamma(1/2p) / (p b^{1/2p}).
double heat_bound_constant(const Lambda0Curve& c);

struct HeatBoundReport {
  double c4 = 0.0;
  double max_violation = -INFINITY;  // max of lhs - C4 t^{-1/2p}
  int violations = 0;
  double worst_t = 0.0;
  int worst_N = 0;
};

// (1/N) sum over twists theta_p = 2 pi p / N of the eigenvalues in (0, eps0),
// weighted by exp(-t lambda), against C4 t^{-1/2p}.
HeatBoundReport small_eigen_heat_bound(const TwistedFamily& family, const Lambda0Curve& curve,
                                       const std::vector<double>& t_grid, const std::vector<int>& N_list);

// max over Lambda of #{lambda <= Lambda} / (vol Lambda^{d/2}).
double eigencount_check(const Spectrum& sp, double vol, const std::vector<double>& lambda_grid, int d);
// 3^d omega_d / (2 pi)^d. Bounds the count ratio on flat tori (d = 1, 2)
// whose shortest period l satisfies l sqrt(Lambda) >= pi.
double flat_weyl_constant(int d);

}  // namespace speclab::covers
