#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"
#include "speclab/spectrum.hpp"

namespace speclab::spectra {

struct TwistedCircle {
  double L = 2.0 * 3.14159265358979323846;
  double m = 0.0;
  double theta = 0.0;
};

// Eigenvalues ((2 pi n + theta)/L)^2 + m^2 for |n| <= n_max, plus the exact tail.
Spectrum twisted_circle_spectrum(const TwistedCircle& c, long n_max);
// (2 pi j/L1)^2 + (2 pi k/L2)^2 + m^2 for |j|, |k| <= n_max.
Spectrum torus_spectrum(double L1, double L2, double m, long n_max);
// (pi j/T)^2 + mu^2 for j = 1..j_max.
Spectrum interval_dirichlet_spectrum(double T, double mu, long j_max);

// A base-graph edge u -- v. `cocycle` counts signed crossings of the cut when
// walking from u to v; on the cover the edge leads from sheet s to s + cocycle.
struct Edge {
  int u = 0;
  int v = 0;
  int cocycle = 0;
};

struct CoverGraph {
  int n_vertices = 0;
  std::vector<Edge> edges;  // parallel edges allowed
  int N = 1;
};

struct CoverMatrices {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd laplacian;
  // Sheet shift (v, s) -> (v, s + 1); commutes with the Laplacian.
  Eigen::MatrixXd deck;
};

// Cover vertices are indexed sheet * n_vertices + v.
CoverMatrices cycle_cover_build(const CoverGraph& g);
Eigen::MatrixXd base_laplacian(const CoverGraph& g);
// Base Laplacian with each edge's (u, v) entry multiplied by exp(i cocycle theta).
Eigen::MatrixXcd twisted_laplacian(const CoverGraph& g, double theta);
// Blocks for theta_p = 2 pi p / N, p = 0..N-1.
std::vector<Eigen::MatrixXcd> twisted_block_decompose(const CoverGraph& g);

// C_n with the single edge (n-1) -- 0 marked.
CoverGraph cycle_base(int n, int N);
// Connected random base graph: a random spanning tree plus extra edges with
// probability p, one tree edge and a few others carrying nonzero cocycles.
CoverGraph random_base(int n, double p, unsigned seed, int N);
int connected_components(const CoverGraph& g);

std::string to_csv(const Spectrum& sp);
nlohmann::json to_json(const Spectrum& sp);

}  // namespace speclab::spectra
