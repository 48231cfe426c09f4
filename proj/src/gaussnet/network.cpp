#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"

namespace speclab::gaussnet {

void GaussianNetwork::assemble() {
  require(n >= 1, "GaussianNetwork: need at least one vertex");
  require(mass2.size() == n, "GaussianNetwork: one mass per vertex");
  Q = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : edges) {
    require(e.u >= 0 && e.u < n && e.v >= 0 && e.v < n && e.u != e.v, "GaussianNetwork: bad edge");
    require(e.w > 0.0, "GaussianNetwork: edge weights must be positive");
    Q(e.u, e.u) += e.w;
    Q(e.v, e.v) += e.w;
    Q(e.u, e.v) -= e.w;
    Q(e.v, e.u) -= e.w;
  }
  Q.diagonal() += mass2;
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  require(llt.info() == Eigen::Success, "GaussianNetwork: Q is not positive definite");
}

Eigen::MatrixXd GaussianNetwork::covariance() const {
  return Q.llt().solve(Eigen::MatrixXd::Identity(n, n));
}

GaussianNetwork make_network(int n, std::vector<WeightedEdge> edges, double m2) {
  GaussianNetwork g;
  g.n = n;
  g.edges = std::move(edges);
  g.mass2 = Eigen::VectorXd::Constant(n, m2);
  g.assemble();
  return g;
}

GaussianNetwork path_network(int n, double m2) {
  std::vector<WeightedEdge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return make_network(n, std::move(e), m2);
}

GaussianNetwork grid_network(int rows, int cols, double m2) {
  std::vector<WeightedEdge> e;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return make_network(rows * cols, std::move(e), m2);
}

namespace {

// Random spanning tree plus Bernoulli(p) extra edges, weights in [0.5, 2].
std::vector<WeightedEdge> random_edges(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<WeightedEdge> e;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(unif(rng) * i);
    const int a = order[i], b = order[j];
    e.push_back({a, b, 0.5 + 1.5 * unif(rng)});
    used[a][b] = used[b][a] = true;
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!used[a][b] && unif(rng) < p) e.push_back({a, b, 0.5 + 1.5 * unif(rng)});
  return e;
}

}  // namespace

GaussianNetwork random_network(int n, double p, std::uint64_t seed, double m2) {
  require(n >= 2, "random_network: need at least 2 vertices");
  std::mt19937_64 rng(seed);
  return make_network(n, random_edges(n, p, rng), m2);
}

GaussianNetwork random_mirror_network(int half, int sigma, double p, std::uint64_t seed, double m2) {
  require(half >= 1 && sigma >= 1, "random_mirror_network: need nonempty half and sigma");
  std::mt19937_64 rng(seed);
  // Vertices: plus = [0, half), sigma = [half, half + sigma), minus = mirror of plus.
  const int base = half + sigma;
  const std::vector<WeightedEdge> e0 = random_edges(base, p, rng);
  const int n = base + half;
  auto mirror = [&](int v) { return v < half ? v + base : v; };
  std::vector<WeightedEdge> e;
  for (const auto& x : e0) {
    e.push_back(x);
    if (x.u < half || x.v < half) e.push_back({mirror(x.u), mirror(x.v), x.w});
  }
  GaussianNetwork g = make_network(n, std::move(e), m2);
  std::vector<int> theta(n);
  for (int v = 0; v < n; ++v) theta[v] = v < half ? v + base : (v >= base ? v - base : v);
  std::vector<int> plus(half), sig(sigma), minus(half);
  std::iota(plus.begin(), plus.end(), 0);
  std::iota(sig.begin(), sig.end(), half);
  std::iota(minus.begin(), minus.end(), base);
  g.regions = {{"plus", plus}, {"sigma", sig}, {"minus", minus}};
  g.involution = theta;
  return g;
}

GaussianNetwork mirror_grid(int rows, int k, double m2) {
  const int cols = 2 * k + 1;
  GaussianNetwork g = grid_network(rows, cols, m2);
  std::vector<int> theta(g.n), plus, sig, minus;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      theta[v] = r * cols + (cols - 1 - c);
      (c < k ? plus : c == k ? sig : minus).push_back(v);
    }
  g.regions = {{"plus", plus}, {"sigma", sig}, {"minus", minus}};
  g.involution = theta;
  return g;
}

GaussianNetwork mirror_path(int k, double m2) { return mirror_grid(1, k, m2); }

bool check_involution(const GaussianNetwork& net, const std::vector<int>& theta, double tol) {
  if (static_cast<int>(theta.size()) != net.n) return false;
  for (int v = 0; v < net.n; ++v)
    if (theta[v] < 0 || theta[v] >= net.n || theta[theta[v]] != v) return false;
  for (int i = 0; i < net.n; ++i)
    for (int j = 0; j < net.n; ++j)
      if (std::abs(net.Q(theta[i], theta[j]) - net.Q(i, j)) > tol) return false;
  return true;
}

std::vector<int> complement(int n, const std::vector<int>& s) {
  std::vector<bool> in(n, false);
  for (int v : s) {
    require(v >= 0 && v < n, "vertex index out of range");
    require(!in[v], "duplicate vertex in set");
    in[v] = true;
  }
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (!in[v]) out.push_back(v);
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXd s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
  return s;
}

int count_components(const GaussianNetwork& net, const std::vector<int>& removed) {
  std::vector<bool> gone(net.n, false);
  for (int v : removed) gone[v] = true;
  std::vector<int> parent(net.n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : net.edges)
    if (!gone[e.u] && !gone[e.v]) parent[find(e.u)] = find(e.v);
  int c = 0;
  for (int v = 0; v < net.n; ++v)
    if (!gone[v] && find(v) == v) ++c;
  return c;
}

DnResult dn_schur(const GaussianNetwork& net, const std::vector<int>& sigma) {
  require(!sigma.empty(), "dn_schur: sigma is empty");
  const std::vector<int> interior = complement(net.n, sigma);
  DnResult r;
  const Eigen::MatrixXd qss = submatrix(net.Q, sigma, sigma);
  if (interior.empty()) {
    r.dn = qss;
  } else {
    const Eigen::MatrixXd qii = submatrix(net.Q, interior, interior);
    const Eigen::MatrixXd qis = submatrix(net.Q, interior, sigma);
    r.dn = qss - qis.transpose() * qii.llt().solve(qis);
    r.dn = 0.5 * (r.dn + r.dn.transpose());
  }
  const Eigen::MatrixXd c = net.covariance();
  const Eigen::MatrixXd dn_inv = r.dn.llt().solve(Eigen::MatrixXd::Identity(sigma.size(), sigma.size()));
  r.duality_residual = (dn_inv - submatrix(c, sigma, sigma)).cwiseAbs().maxCoeff();
  return r;
}

Eigen::MatrixXd poisson_operator(const GaussianNetwork& net, const std::vector<int>& sigma) {
  require(!sigma.empty(), "poisson_operator: sigma is empty");
  const std::vector<int> interior = complement(net.n, sigma);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(net.n, sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) pi(sigma[j], j) = 1.0;
  if (!interior.empty()) {
    const Eigen::MatrixXd qii = submatrix(net.Q, interior, interior);
    Eigen::LLT<Eigen::MatrixXd> llt(qii);
    if (llt.info() != Eigen::Success) throw NumericalError("poisson_extend: interior block is singular");
    const Eigen::MatrixXd ext = -llt.solve(submatrix(net.Q, interior, sigma));
    for (std::size_t i = 0; i < interior.size(); ++i) pi.row(interior[i]) = ext.row(i);
  }
  return pi;
}

PoissonResult poisson_extend(const GaussianNetwork& net, const std::vector<int>& sigma, const Eigen::VectorXd& f) {
  require(f.size() == static_cast<Eigen::Index>(sigma.size()), "poisson_extend: boundary data size mismatch");
  PoissonResult r;
  r.u = poisson_operator(net, sigma) * f;
  for (std::size_t j = 0; j < sigma.size(); ++j) r.u(sigma[j]) = f(j);  // exact on sigma
  const Eigen::VectorXd qu = net.Q * r.u;
  for (int v : complement(net.n, sigma)) r.interior_residual = std::max(r.interior_residual, std::abs(qu(v)));
  const DnResult dn = dn_schur(net, sigma);
  r.energy_residual = std::abs(f.dot(dn.dn * f) - r.u.dot(qu));
  return r;
}

}  // namespace speclab::gaussnet
