#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "speclab/numerics.hpp"

namespace speclab::transfer {

// Even polynomial P(x) = sum_k c[k] x^{2k}.
struct EvenPoly {
  std::vector<double> c;
  double operator()(double x) const;
  // Leading coefficient positive and degree at least 2, so exp(-P) is integrable on the line.
  bool admissible() const;
};

// Discretized transfer operator with kernel exp(-(x-y)^2 - (P(x)+P(y))/2).
// The symmetric matrix is T = D Kg D with Kg_ij = exp(-(x_i-x_j)^2) and
// D = diag(sqrt(w_i) exp(-P(x_i)/2)); log_d keeps D in log form because it
// underflows at the grid edges for steep potentials.
struct TransferModel {
  EvenPoly P;
  numerics::QuadratureRule quad;
  Eigen::VectorXd log_d;
  Eigen::MatrixXd T;
  double truncation_bound = 0.0;

  double log_entry(int i, int j) const;
};

TransferModel build_transfer(const EvenPoly& P, int grid_size = 200, double grid_halfwidth = 8.0);
// Single-threaded reference for the Nystrom matrix fill.
Eigen::MatrixXd nystrom_matrix_serial(const EvenPoly& P, const numerics::QuadratureRule& q);
Eigen::MatrixXd nystrom_matrix(const EvenPoly& P, const numerics::QuadratureRule& q);

// log tr(T^N), accumulated as N log lambda_0 + log sum (lambda_i / lambda_0)^N.
double log_partition_function(const TransferModel& m, int N);
double partition_function(const TransferModel& m, int N);

struct TopEigen {
  double lambda0 = 0.0;
  double lambda1 = 0.0;  // second largest in absolute value
  double alpha = 0.0;    // |lambda1| / lambda0
  Eigen::VectorXd omega0;  // unit vector in symmetrized coordinates, may underflow
  Eigen::VectorXd y;       // omega0 = D y, y strictly positive when certified
  bool positive = false;
};

// Throws NumericalError if the top eigenvalue is not simple.
TopEigen top_eigenpair(const TransferModel& m);
TopEigen top_eigenpair(const Eigen::MatrixXd& t);

struct GibbsQuery {
  std::vector<Eigen::VectorXd> observables;  // values on the grid nodes
  std::vector<int> positions;                // 1-based, strictly increasing
  int N = 1;
};

double gibbs_expectation(const TransferModel& m, const GibbsQuery& q);

// max over k <= k_max of |<F, U^k G> - <F,W><W,G>| - alpha^k |F||G| with
// U = T / lambda_0. F and G are given in symmetrized coordinates (sqrt(w) f).
double mixing_check(const TransferModel& m, const Eigen::VectorXd& f, const Eigen::VectorXd& g, int k_max);

struct FreeEnergyResult {
  std::vector<int> N;
  std::vector<double> values;  // (1/N) log Z(N)
  double limit = 0.0;          // log lambda_0
  double fit_c = 0.0;          // |value - limit| ~ fit_c * fit_rate^N
  double fit_rate = 0.0;
};

// Throws NumericalError when P is constant (no confinement).
FreeEnergyResult free_energy_density(const TransferModel& m, const std::vector<int>& N_list);

// Gaussian chain oracle: pi^{N/2} prod_k (2 - 2cos(2 pi k/N) + m^2)^{-1/2}, in log form.
double gaussian_chain_log_z(int N, double m);

struct McmcResult {
  std::vector<double> samples;  // one configuration per sweep, row-major (sweeps x N)
  long sweeps = 0;
  int N = 0;
  double acceptance_rate = 0.0;
};

// Metropolis chain for exp(-S), S = sum (s_{i+1}-s_i)^2 + sum P(s_i), periodic.
// One step is one single-site update; samples are recorded after each sweep.
McmcResult mcmc_chain(const EvenPoly& P, int N, long steps, std::uint64_t seed, double width = 1.0,
                      long burn_in_sweeps = 1000);

// Batch-means mean and standard error of a per-sweep statistic.
struct MeanError {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MeanError batch_means(const std::vector<double>& series, int batches = 50);

struct McmcFreeEnergy {
  double value = 0.0;  // (1/N) log Z(N)
  double standard_error = 0.0;
  std::vector<double> lambda_nodes;
  std::vector<double> means;
  std::vector<double> errors;
  double mean_acceptance = 0.0;
};

// Thermodynamic integration from the exactly solvable P0 = x^2 chain along
// P0 + lambda (P - P0), one chain per Gauss-Legendre node.
McmcFreeEnergy mcmc_free_energy(const EvenPoly& P, int N, long steps_per_chain, std::uint64_t seed,
                                int nodes = 8, bool parallel = true);

}  // namespace speclab::transfer
