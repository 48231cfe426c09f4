#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace speclab::gaussnet {

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// Gaussian free field on a weighted graph: density proportional to
// exp(-phi^T Q phi / 2) with Q = L_w + diag(mass2).
struct GaussianNetwork {
  int n = 0;
  std::vector<WeightedEdge> edges;
  Eigen::VectorXd mass2;
  Eigen::MatrixXd Q;
  std::map<std::string, std::vector<int>> regions;
  std::optional<std::vector<int>> involution;

  // Rebuilds Q from edges and masses and checks Q > 0.
  void assemble();
  Eigen::MatrixXd covariance() const;
};

GaussianNetwork make_network(int n, std::vector<WeightedEdge> edges, double m2);
GaussianNetwork path_network(int n, double m2);
GaussianNetwork grid_network(int rows, int cols, double m2);
GaussianNetwork random_network(int n, double p, std::uint64_t seed, double m2);
// Reflection-symmetric network: a random half on `half` vertices plus `sigma`
// fixed vertices, mirrored. Regions "plus", "minus", "sigma"; involution set.
GaussianNetwork random_mirror_network(int half, int sigma, double p, std::uint64_t seed, double m2);
// rows x (2k+1) grid reflected through its middle column.
GaussianNetwork mirror_grid(int rows, int k, double m2);
// Path of 2k+1 vertices reflected through the middle vertex.
GaussianNetwork mirror_path(int k, double m2);
bool check_involution(const GaussianNetwork& net, const std::vector<int>& theta, double tol = 0.0);

// Index helpers.
std::vector<int> complement(int n, const std::vector<int>& s);
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows, const std::vector<int>& cols);
int count_components(const GaussianNetwork& net, const std::vector<int>& removed);

struct DnResult {
  Eigen::MatrixXd dn;
  double duality_residual = 0.0;  // max |DN^{-1} - (Q^{-1})_{Sigma Sigma}|
};

// Schur complement of Q onto sigma, eliminating every other vertex.
DnResult dn_schur(const GaussianNetwork& net, const std::vector<int>& sigma);

struct PoissonResult {
  Eigen::VectorXd u;
  double interior_residual = 0.0;  // max |(Q u)_I|
  double energy_residual = 0.0;    // |<f, DN f> - u^T Q u|
};

PoissonResult poisson_extend(const GaussianNetwork& net, const std::vector<int>& sigma, const Eigen::VectorXd& f);
// The n x |sigma| matrix of the Poisson extension operator.
Eigen::MatrixXd poisson_operator(const GaussianNetwork& net, const std::vector<int>& sigma);

// Neumann closure of a subnetwork omega u boundary.
//  subgraph:    Laplacian of the induced subgraph plus the vertex masses.
//  half_weight: Q restricted to omega u boundary with the boundary block
//               halved; the even quotient of a reflection-symmetric network.
enum class Closure { subgraph, half_weight };

struct CnCdReport {
  double residual = 0.0;         // max |PI DN^{-1} PI^T - (C_N - C_D)|
  double min_eigenvalue = 0.0;   // of C_N - C_D
  Eigen::MatrixXd cn;
  Eigen::MatrixXd cd;
  Eigen::MatrixXd dn;            // one-sided DN of the closed subnetwork
  std::vector<int> vertices;     // omega then boundary, the index order of cn and cd
};

CnCdReport cn_minus_cd_check(const GaussianNetwork& net, const std::vector<int>& omega,
                             const std::vector<int>& boundary, Closure closure = Closure::subgraph);

struct MarkovReport {
  double cross_covariance = 0.0;    // max |Cov(PI phi_S, phi - PI phi_S)|
  double split_residual = 0.0;      // max |C - PI DN^{-1} PI^T - C_D|
  double bayes_residual = 0.0;      // two conditioning orders vs each other and the joint precision
  double markov_residual = 0.0;     // max conditional covariance across the separator
  int components = 0;
};

MarkovReport markov_bayes_check(const GaussianNetwork& net, const std::vector<int>& sigma1,
                                const std::vector<int>& sigma2);

struct RpReport {
  double min_eigenvalue = 0.0;     // of G_ij = <Theta f_i, C f_j>
  double identity_residual = 0.0;  // max_i |2 <f_i, Theta C f_i> - <f_i, (C_N - C_D) f_i>|
  Closure closure = Closure::half_weight;
};

// Test vectors are columns of `tests` (n rows), supported on region "plus" (or "sigma").
RpReport rp_gram(const GaussianNetwork& net, const Eigen::MatrixXd& tests, Closure closure = Closure::half_weight);

// ---- Wick calculus ---------------------------------------------------------

// Expectation of prod_i X_i^{n_i} (or of prod_i :X_i^{n_i}: when wick_ordered)
// for a centred Gaussian vector with covariance `cov`, by enumerating pairings.
// Total degree at most 12; odd degree gives 0.
double wick_product_expectation(const Eigen::MatrixXd& cov, const std::vector<int>& powers, bool wick_ordered);

// Pairing counts: each key lists how often each covariance entry (i <= j,
// row-major over the upper triangle) appears; the value is the number of pairings.
std::map<std::vector<int>, long> wick_pairing_counts(int k, const std::vector<int>& powers, bool wick_ordered);

// The same Wick-ordered expectation through the Hermite expansion
// :X^n: = c^{n/2} He_n(X / sqrt c), c = Var X.
double wick_expectation_hermite(const Eigen::MatrixXd& cov, const std::vector<int>& powers);

// :x^n: for variance c.
double wick_power(double x, int n, double c);

struct MonteCarlo {
  double mean = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

// Draws n_samples from N(0, cov) in fixed blocks, each block with its own
// seeded stream, and averages prod_i X_i^{n_i} (Wick ordered if requested).
MonteCarlo wick_monte_carlo(const Eigen::MatrixXd& cov, const std::vector<int>& powers, bool wick_ordered,
                            long n_samples, std::uint64_t seed, bool parallel = true);

// Samples of N(0, Q^{-1}) as rows, via the Cholesky factor of Q.
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& Q, long n_samples, std::uint64_t seed);

struct InteractionStats {
  MonteCarlo action;       // S = sum_x sum_k a_k :phi_x^k:
  MonteCarlo boltzmann;    // exp(-S)
  double min_action = 0.0;
  double effective_fraction = 0.0;  // (sum w)^2 / (n sum w^2) for w = exp(-S)
  bool flagged = false;
  std::string note;
};

// wick_coeffs[k] multiplies :phi^k:, with Wick ordering at the per-vertex variance (Q^{-1})_xx.
InteractionStats wick_interaction(const GaussianNetwork& net, const std::vector<double>& wick_coeffs, long n_samples,
                                  std::uint64_t seed, bool parallel = true);

// exp(tr V / 2) det(1 + V)^{-1/2} with V = 2 g C: E[exp(-g sum_x :phi_x^2:)].
double quadratic_perturbation_exact(const GaussianNetwork& net, double g);

// ---- Gaussian amplitudes --------------------------------------------------

// A network with ordered boundary vertex lists. The amplitude is
// K(out, in) = integral over interior values of exp(-phi^T Q phi / 2).
struct BoundaryNetwork {
  GaussianNetwork net;
  std::vector<int> out;
  std::vector<int> in;
};

// exp(log_norm - x^T M x / 2) in the variables x = (out, in). The identity
// flag stands for the delta kernel of an empty network.
struct GaussianKernel {
  int n_out = 0;
  int n_in = 0;
  Eigen::MatrixXd M;
  double log_norm = 0.0;
  bool identity = false;
};

GaussianKernel boundary_kernel(const BoundaryNetwork& b);
GaussianKernel identity_kernel(int n);
// (K2 o K1)(out2, in1) = integral K2(out2, s) K1(s, in1) ds.
GaussianKernel compose(const GaussianKernel& k2, const GaussianKernel& k1);
// Identifies b2.in[i] with b1.out[i]; Q entries of shared vertices add.
BoundaryNetwork glue(const BoundaryNetwork& b2, const BoundaryNetwork& b1);

struct ComposeReport {
  double quadratic_residual = 0.0;
  double normalization_residual = 0.0;
};

ComposeReport amplitude_compose(const BoundaryNetwork& b2, const BoundaryNetwork& b1);
// Path of n vertices with out = {n-1}, in = {0}; endpoint masses halved so
// that gluing intervals end to end gives a uniform longer interval.
BoundaryNetwork interval_network(int n, double m2);
// log of the full Gaussian integral of exp(-phi^T Q phi / 2).
double log_partition(const Eigen::MatrixXd& Q);

}  // namespace speclab::gaussnet
