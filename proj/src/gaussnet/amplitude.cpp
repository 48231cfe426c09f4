#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"

namespace speclab::gaussnet {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double log_det_spd(const Eigen::MatrixXd& a, const std::string& what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError(what + ": matrix is not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += 2.0 * std::log(llt.matrixL()(i, i));
  return s;
}

}  // namespace

double log_partition(const Eigen::MatrixXd& Q) {
  return 0.5 * Q.rows() * kLog2Pi - 0.5 * log_det_spd(Q, "log_partition");
}

GaussianKernel identity_kernel(int n) {
  GaussianKernel k;
  k.n_out = k.n_in = n;
  k.identity = true;
  return k;
}

GaussianKernel boundary_kernel(const BoundaryNetwork& b) {
  std::vector<int> bnd = b.out;
  bnd.insert(bnd.end(), b.in.begin(), b.in.end());
  const std::vector<int> interior = complement(b.net.n, bnd);  // validates disjointness
  GaussianKernel k;
  k.n_out = static_cast<int>(b.out.size());
  k.n_in = static_cast<int>(b.in.size());
  const Eigen::MatrixXd qbb = submatrix(b.net.Q, bnd, bnd);
  if (interior.empty()) {
    k.M = qbb;
    return k;
  }
  const Eigen::MatrixXd qii = submatrix(b.net.Q, interior, interior);
  const Eigen::MatrixXd qib = submatrix(b.net.Q, interior, bnd);
  k.M = qbb - qib.transpose() * qii.llt().solve(qib);
  k.M = 0.5 * (k.M + k.M.transpose());
  k.log_norm = 0.5 * interior.size() * kLog2Pi - 0.5 * log_det_spd(qii, "boundary_kernel");
  return k;
}

GaussianKernel compose(const GaussianKernel& k2, const GaussianKernel& k1) {
  require(k2.n_in == k1.n_out, "compose: boundary sizes do not match");
  if (k2.identity) return k1;
  if (k1.identity) return k2;
  const int nb = k2.n_out, ns = k2.n_in, na = k1.n_in;
  const int n = nb + ns + na;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.topLeftCorner(nb + ns, nb + ns) += k2.M;
  m.bottomRightCorner(ns + na, ns + na) += k1.M;
  // Integrate out the shared block s = [nb, nb + ns).
  std::vector<int> keep, mid;
  for (int i = 0; i < nb; ++i) keep.push_back(i);
  for (int i = nb + ns; i < n; ++i) keep.push_back(i);
  for (int i = nb; i < nb + ns; ++i) mid.push_back(i);
  const Eigen::MatrixXd mss = submatrix(m, mid, mid);
  const Eigen::MatrixXd msk = submatrix(m, mid, keep);
  GaussianKernel out;
  out.n_out = nb;
  out.n_in = na;
  out.M = submatrix(m, keep, keep) - msk.transpose() * mss.llt().solve(msk);
  out.M = 0.5 * (out.M + out.M.transpose());
  out.log_norm = k1.log_norm + k2.log_norm + 0.5 * ns * kLog2Pi - 0.5 * log_det_spd(mss, "compose");
  return out;
}

BoundaryNetwork glue(const BoundaryNetwork& b2, const BoundaryNetwork& b1) {
  require(b2.in.size() == b1.out.size(), "glue: boundary sizes do not match");
  const int n1 = b1.net.n;
  std::vector<int> map(b2.net.n, -1);
  for (std::size_t i = 0; i < b2.in.size(); ++i) map[b2.in[i]] = b1.out[i];
  int next = n1;
  for (int v = 0; v < b2.net.n; ++v)
    if (map[v] < 0) map[v] = next++;
  BoundaryNetwork g;
  g.net.n = next;
  g.net.edges = b1.net.edges;
  for (const auto& e : b2.net.edges) g.net.edges.push_back({map[e.u], map[e.v], e.w});
  g.net.mass2 = Eigen::VectorXd::Zero(next);
  g.net.mass2.head(n1) = b1.net.mass2;
  for (int v = 0; v < b2.net.n; ++v) g.net.mass2(map[v]) += b2.net.mass2(v);
  g.net.assemble();
  for (int v : b2.out) g.out.push_back(map[v]);
  g.in = b1.in;
  return g;
}

ComposeReport amplitude_compose(const BoundaryNetwork& b2, const BoundaryNetwork& b1) {
  const GaussianKernel composed = compose(boundary_kernel(b2), boundary_kernel(b1));
  const GaussianKernel glued = boundary_kernel(glue(b2, b1));
  ComposeReport r;
  r.quadratic_residual = composed.M.size() ? (composed.M - glued.M).cwiseAbs().maxCoeff() : 0.0;
  r.normalization_residual = std::abs(composed.log_norm - glued.log_norm);
  return r;
}

BoundaryNetwork interval_network(int n, double m2) {
  require(n >= 2, "interval_network: need at least 2 vertices");
  BoundaryNetwork b;
  b.net.n = n;
  for (int i = 0; i + 1 < n; ++i) b.net.edges.push_back({i, i + 1, 1.0});
  b.net.mass2 = Eigen::VectorXd::Constant(n, m2);
  b.net.mass2(0) = b.net.mass2(n - 1) = 0.5 * m2;
  b.net.assemble();
  b.out = {n - 1};
  b.in = {0};
  return b;
}

}  // namespace speclab::gaussnet
