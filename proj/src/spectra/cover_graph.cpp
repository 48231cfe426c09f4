#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "speclab/error.hpp"
#include "speclab/spectra.hpp"

namespace speclab::spectra {

namespace {

void validate(const CoverGraph& g) {
  require(g.n_vertices >= 1, "cover graph: need at least one vertex");
  require(g.N >= 1, "cover graph: degree N must be at least 1");
  for (const Edge& e : g.edges) {
    require(e.u >= 0 && e.u < g.n_vertices && e.v >= 0 && e.v < g.n_vertices,
            "cover graph: edge endpoint out of range");
    require(e.u != e.v, "cover graph: self-loops are not supported");
  }
  require(connected_components(g) == 1, "cover graph: base graph must be connected");
}

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

int connected_components(const CoverGraph& g) {
  std::vector<int> parent(g.n_vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = g.n_vertices;
  for (const Edge& e : g.edges) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

Eigen::MatrixXd base_laplacian(const CoverGraph& g) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.n_vertices, g.n_vertices);
  for (const Edge& e : g.edges) {
    lap(e.u, e.u) += 1.0;
    lap(e.v, e.v) += 1.0;
    lap(e.u, e.v) -= 1.0;
    lap(e.v, e.u) -= 1.0;
  }
  return lap;
}

CoverMatrices cycle_cover_build(const CoverGraph& g) {
  validate(g);
  const int n = g.n_vertices;
  const int big = n * g.N;
  CoverMatrices out;
  out.adjacency = Eigen::MatrixXd::Zero(big, big);
  for (int s = 0; s < g.N; ++s) {
    for (const Edge& e : g.edges) {
      const int a = s * n + e.u;
      const int b = mod(s + e.cocycle, g.N) * n + e.v;
      out.adjacency(a, b) += 1.0;
      out.adjacency(b, a) += 1.0;
    }
  }
  out.laplacian = -out.adjacency;
  for (int i = 0; i < big; ++i) out.laplacian(i, i) += out.adjacency.row(i).sum();
  out.deck = Eigen::MatrixXd::Zero(big, big);
  for (int s = 0; s < g.N; ++s)
    for (int v = 0; v < n; ++v) out.deck(((s + 1) % g.N) * n + v, s * n + v) = 1.0;
  return out;
}

Eigen::MatrixXcd twisted_laplacian(const CoverGraph& g, double theta) {
  Eigen::MatrixXcd lap = Eigen::MatrixXcd::Zero(g.n_vertices, g.n_vertices);
  for (const Edge& e : g.edges) {
    const std::complex<double> phase = std::polar(1.0, e.cocycle * theta);
    lap(e.u, e.u) += 1.0;
    lap(e.v, e.v) += 1.0;
    lap(e.u, e.v) -= phase;
    lap(e.v, e.u) -= std::conj(phase);
  }
  return lap;
}

std::vector<Eigen::MatrixXcd> twisted_block_decompose(const CoverGraph& g) {
  validate(g);
  std::vector<Eigen::MatrixXcd> blocks;
  for (int p = 0; p < g.N; ++p) blocks.push_back(twisted_laplacian(g, 2.0 * std::numbers::pi * p / g.N));
  return blocks;
}

CoverGraph cycle_base(int n, int N) {
  require(n >= 2, "cycle_base: need at least 2 vertices");
  CoverGraph g;
  g.n_vertices = n;
  g.N = N;
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 0});
  g.edges.push_back({n - 1, 0, 1});
  return g;
}

CoverGraph random_base(int n, double p, unsigned seed, int N) {
  require(n >= 2, "random_base: need at least 2 vertices");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  CoverGraph g;
  g.n_vertices = n;
  g.N = N;
  std::set<std::pair<int, int>> used;
  for (int v = 1; v < n; ++v) {
    const int w = static_cast<int>(u01(rng) * v);
    g.edges.push_back({w, v, 0});
    used.insert({w, v});
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!used.count({a, b}) && u01(rng) < p) {
        const int w = u01(rng) < 0.3 ? (u01(rng) < 0.5 ? 1 : -1) : 0;
        g.edges.push_back({a, b, w});
      }
  g.edges.front().cocycle = 1;
  return g;
}

}  // namespace speclab::spectra
