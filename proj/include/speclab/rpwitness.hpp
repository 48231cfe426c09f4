#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace speclab::rpwitness {

enum class Construction { line_derivative, cylinder, compact_dual, fourier_ball };

std::string to_string(Construction c);
Construction construction_from_string(const std::string& s);

// A test function f on the positive half together with the value of
// <Theta f, C_Lambda f> for the spectrally cut covariance C_Lambda.
struct WitnessCertificate {
  Construction construction = Construction::line_derivative;
  std::map<std::string, double> parameters;
  std::vector<double> coefficients;  // basis expansion of f, when there is one
  double pairing_value = 0.0;
  double tolerance = 0.0;             // quadrature error bound on pairing_value
  bool negative = false;              // pairing_value < -tolerance
  double uncut_value = 0.0;           // the same f against the uncut covariance
  std::vector<double> trend;          // pairing against n or basis size
  bool flagged = false;
  std::string note;
};

// Recomputes the pairing from parameters and coefficients alone.
double reevaluate(const WitnessCertificate& cert);

// ---- one dimension and cylinders ------------------------------------------

// Standard bump exp(-1/(1-u^2)), u = (x - pi/2)/0.4, and its cosine and sine transforms.
double bump(double x);
struct BumpTransform {
  double A = 0.0;  // int phi(x) cos(xi x) dx
  double B = 0.0;  // int phi(x) sin(xi x) dx
};
BumpTransform bump_transform(double xi);
// int phi(x) e^{-mu x} dx.
double bump_laplace(double mu);

// int_{-1}^{1} F(phi^{(2n)})(xi)^2 d xi / (xi^2 + kappa).
double line_pairing(int n, double kappa);
// The same with the integral over all of R, through the real-space kernel.
double line_pairing_uncut(int n, double kappa);
// int_R by direct quadrature in xi; a cross-check for small n.
double line_pairing_uncut_fourier(int n, double kappa);

WitnessCertificate line_witness(double kappa, int n_max = 40);

// Slice circle of length L with chi the normalized constant mode.
// n < 0 searches for the smallest n giving a negative pairing.
WitnessCertificate cylinder_witness(double Lambda, double L = 6.283185307179586, int n = -1, int n_max = 40);

// ---- compact circle -------------------------------------------------------

// Circle of length 2 pi, reflection theta -> -theta, f supported in (0, pi).
struct CompactOptions {
  int extra_basis = 12;   // cubic B-splines beyond the number of moment constraints
  int max_doublings = 4;
  double margin = 0.1;    // splines live on [margin, pi - margin]
};

WitnessCertificate compact_witness(double Lambda, const CompactOptions& opt = {});
// Largest k^2 <= Lambda with k >= 1.
double largest_odd_eigenvalue(double Lambda);

// Cubic B-spline basis on uniform knots; f(theta) = sum c_j N_j(theta).
double compact_function(const std::vector<double>& coefficients, double margin, double theta);
// <f, e> for the orthonormal modes up to frequency K: constant, then (cos k, sin k) pairs.
std::vector<double> compact_moments(const std::vector<double>& coefficients, double margin, int K);

// ---- flat space, d = 3 ----------------------------------------------------

struct BallOptions {
  double bump_width = 0.5;
  double spacing = 0.25;
  double offset = 0.05;  // support starts at x_1 = offset
};

// -int_{|xi|^2 <= Lambda} xi_1^2 / (1 + |xi|^2) d xi.
double ball_target(double Lambda);
// Basis g_j(x_1) = psi'(x_1 - c_j), c_j = offset + width + j spacing, times the transverse
// profile whose transform is the indicator of the disk of radius sqrt(Lambda).
double ball_pairing(double Lambda, const std::vector<double>& coefficients, const BallOptions& opt);
double ball_pairing_uncut(double Lambda, const std::vector<double>& coefficients, const BallOptions& opt);
WitnessCertificate fourier_ball_witness(double Lambda, int basis_size, const BallOptions& opt = {});

// ---- small coupling -------------------------------------------------------

struct ReweightResult {
  double coupling = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double gaussian_value = 0.0;
  std::size_t samples = 0;
};

// E[Phi(f) Phi(Theta f) e^{-c S}] / E[e^{-c S}] for the compact cut-off field, with
// S = int Phi^4 over a uniform slice of `lattice` points.
ReweightResult phi4_reweighted_pairing(const WitnessCertificate& compact, double coupling, std::size_t samples,
                                       std::uint64_t seed, int lattice = 64, bool parallel = true);

}  // namespace speclab::rpwitness
