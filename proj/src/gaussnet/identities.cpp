#include <algorithm>
#include <cmath>

#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"
#include "speclab/numerics.hpp"

namespace speclab::gaussnet {

namespace {

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& a, const std::string& what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw PreconditionError(what);
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

Eigen::MatrixXd schur_onto(const Eigen::MatrixXd& q, const std::vector<int>& keep) {
  const std::vector<int> rest = complement(static_cast<int>(q.rows()), keep);
  const Eigen::MatrixXd qkk = submatrix(q, keep, keep);
  if (rest.empty()) return qkk;
  const Eigen::MatrixXd qrk = submatrix(q, rest, keep);
  Eigen::MatrixXd s = qkk - qrk.transpose() * submatrix(q, rest, rest).llt().solve(qrk);
  return 0.5 * (s + s.transpose());
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c = a;
  c.insert(c.end(), b.begin(), b.end());
  return c;
}

const std::vector<int>& region(const GaussianNetwork& net, const std::string& name) {
  const auto it = net.regions.find(name);
  require(it != net.regions.end(), "network has no region '" + name + "'");
  return it->second;
}

}  // namespace

CnCdReport cn_minus_cd_check(const GaussianNetwork& net, const std::vector<int>& omega,
                             const std::vector<int>& boundary, Closure closure) {
  require(!omega.empty() && !boundary.empty(), "cn_minus_cd_check: omega and boundary must be nonempty");
  const std::vector<int> verts = concat(omega, boundary);
  complement(net.n, verts);  // validates range and disjointness
  std::vector<int> where(net.n, -1);
  for (std::size_t i = 0; i < verts.size(); ++i) where[verts[i]] = static_cast<int>(i);
  std::vector<bool> in_omega(net.n, false);
  for (int v : omega) in_omega[v] = true;
  for (const auto& e : net.edges) {
    const bool bad = (in_omega[e.u] && where[e.v] < 0) || (in_omega[e.v] && where[e.u] < 0);
    require(!bad, "cn_minus_cd_check: omega has a neighbour outside omega u boundary");
  }
  const int no = static_cast<int>(omega.size()), nb = static_cast<int>(boundary.size());
  const int nv = no + nb;

  Eigen::MatrixXd qn;
  if (closure == Closure::subgraph) {
    qn = Eigen::MatrixXd::Zero(nv, nv);
    std::vector<int> deg(nv, 0);
    for (const auto& e : net.edges) {
      const int a = where[e.u], b = where[e.v];
      if (a < 0 || b < 0) continue;
      qn(a, a) += e.w;
      qn(b, b) += e.w;
      qn(a, b) -= e.w;
      qn(b, a) -= e.w;
      ++deg[a];
      ++deg[b];
    }
    for (int i = 0; i < nv; ++i) {
      qn(i, i) += net.mass2(verts[i]);
      if (i >= no && deg[i] == 0 && net.mass2(verts[i]) <= 0.0)
        throw PreconditionError("cn_minus_cd_check: isolated boundary vertex makes the Neumann closure singular");
    }
  } else {
    qn = submatrix(net.Q, verts, verts);
    qn.bottomRightCorner(nb, nb) *= 0.5;
  }

  CnCdReport r;
  r.vertices = verts;
  r.cn = inverse_spd(qn, "cn_minus_cd_check: Neumann closure is not positive definite");
  const Eigen::MatrixXd qii = qn.topLeftCorner(no, no);
  const Eigen::MatrixXd qib = qn.topRightCorner(no, nb);
  r.cd = Eigen::MatrixXd::Zero(nv, nv);
  r.cd.topLeftCorner(no, no) = inverse_spd(qii, "cn_minus_cd_check: interior block is singular");
  r.dn = qn.bottomRightCorner(nb, nb) - qib.transpose() * r.cd.topLeftCorner(no, no) * qib;
  r.dn = 0.5 * (r.dn + r.dn.transpose());
  Eigen::MatrixXd pi(nv, nb);
  pi.topRows(no) = -r.cd.topLeftCorner(no, no) * qib;
  pi.bottomRows(nb) = Eigen::MatrixXd::Identity(nb, nb);
  const Eigen::MatrixXd lhs = pi * inverse_spd(r.dn, "cn_minus_cd_check: DN is singular") * pi.transpose();
  const Eigen::MatrixXd diff = r.cn - r.cd;
  r.residual = (lhs - diff).cwiseAbs().maxCoeff();
  r.min_eigenvalue = numerics::sym_eig_pairs(0.5 * (diff + diff.transpose())).values(0);
  return r;
}

MarkovReport markov_bayes_check(const GaussianNetwork& net, const std::vector<int>& sigma1,
                                const std::vector<int>& sigma2) {
  require(!sigma1.empty(), "markov_bayes_check: sigma1 is empty");
  const std::vector<int> sigma = concat(sigma1, sigma2);
  const std::vector<int> interior = complement(net.n, sigma);  // also checks disjointness
  MarkovReport r;
  r.components = count_components(net, sigma1);
  require(r.components >= 2, "markov_bayes_check: sigma1 does not separate the network");

  const Eigen::MatrixXd c = net.covariance();
  const Eigen::MatrixXd pi = poisson_operator(net, sigma);
  const Eigen::MatrixXd dn = schur_onto(net.Q, sigma);
  // P maps phi to the Poisson extension of its restriction to sigma.
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(net.n, net.n);
  for (std::size_t j = 0; j < sigma.size(); ++j) p.col(sigma[j]) = pi.col(j);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(net.n, net.n);
  r.cross_covariance = (p * c * (id - p).transpose()).cwiseAbs().maxCoeff();

  Eigen::MatrixXd cd = Eigen::MatrixXd::Zero(net.n, net.n);
  const Eigen::MatrixXd qii_inv = inverse_spd(submatrix(net.Q, interior, interior), "markov_bayes_check: interior");
  for (std::size_t i = 0; i < interior.size(); ++i)
    for (std::size_t j = 0; j < interior.size(); ++j) cd(interior[i], interior[j]) = qii_inv(i, j);
  r.split_residual = (c - pi * inverse_spd(dn, "markov_bayes_check: DN") * pi.transpose() - cd).cwiseAbs().maxCoeff();

  // Markov property: given phi on sigma1, distinct components are independent.
  {
    const std::vector<int> rest = complement(net.n, sigma1);
    const Eigen::MatrixXd cond = inverse_spd(submatrix(net.Q, rest, rest), "markov_bayes_check: conditional");
    // Component labels of the vertices in rest.
    std::vector<int> label(net.n, -1);
    int next = 0;
    for (int s : rest) {
      if (label[s] >= 0) continue;
      std::vector<int> stack{s};
      label[s] = next;
      std::vector<bool> cut(net.n, false);
      for (int v : sigma1) cut[v] = true;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& e : net.edges) {
          const int w = e.u == v ? e.v : (e.v == v ? e.u : -1);
          if (w >= 0 && !cut[w] && label[w] < 0) {
            label[w] = next;
            stack.push_back(w);
          }
        }
      }
      ++next;
    }
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = 0; j < rest.size(); ++j)
        if (label[rest[i]] != label[rest[j]]) r.markov_residual = std::max(r.markov_residual, std::abs(cond(i, j)));
  }

  if (!sigma2.empty()) {
    // Joint precision of (phi_1, phi_2) assembled as p(phi_a) p(phi_b | phi_a).
    auto route = [&](const std::vector<int>& a, const std::vector<int>& b) {
      const Eigen::MatrixXd pa = schur_onto(net.Q, a);
      const std::vector<int> rest = complement(net.n, a);
      const Eigen::MatrixXd qrr = submatrix(net.Q, rest, rest);
      const Eigen::MatrixXd mean_map = -qrr.llt().solve(submatrix(net.Q, rest, a));
      std::vector<int> pos;
      for (int v : b) pos.push_back(static_cast<int>(std::find(rest.begin(), rest.end(), v) - rest.begin()));
      std::vector<int> all_cols(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) all_cols[j] = static_cast<int>(j);
      const Eigen::MatrixXd m = submatrix(mean_map, pos, all_cols);
      const Eigen::MatrixXd pb = schur_onto(qrr, pos);
      const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
      Eigen::MatrixXd j(na + nb, na + nb);
      j.topLeftCorner(na, na) = pa + m.transpose() * pb * m;
      j.topRightCorner(na, nb) = -m.transpose() * pb;
      j.bottomLeftCorner(nb, na) = -pb * m;
      j.bottomRightCorner(nb, nb) = pb;
      return j;
    };
    const Eigen::MatrixXd ja = route(sigma1, sigma2);
    const Eigen::MatrixXd jb_raw = route(sigma2, sigma1);
    const int n1 = static_cast<int>(sigma1.size()), n2 = static_cast<int>(sigma2.size());
    Eigen::MatrixXd jb(n1 + n2, n1 + n2);
    jb.topLeftCorner(n1, n1) = jb_raw.bottomRightCorner(n1, n1);
    jb.topRightCorner(n1, n2) = jb_raw.bottomLeftCorner(n1, n2);
    jb.bottomLeftCorner(n2, n1) = jb_raw.topRightCorner(n2, n1);
    jb.bottomRightCorner(n2, n2) = jb_raw.topLeftCorner(n2, n2);
    r.bayes_residual = std::max((ja - jb).cwiseAbs().maxCoeff(), (ja - dn).cwiseAbs().maxCoeff());
  }
  return r;
}

RpReport rp_gram(const GaussianNetwork& net, const Eigen::MatrixXd& tests, Closure closure) {
  require(net.involution.has_value(), "rp_gram: network has no involution");
  const std::vector<int>& theta = *net.involution;
  require(check_involution(net, theta, 1e-14 * (1.0 + net.Q.cwiseAbs().maxCoeff())),
          "rp_gram: involution is not an automorphism of Q");
  require(tests.rows() == net.n && tests.cols() >= 1, "rp_gram: test vectors must be columns of length n");
  const std::vector<int>& plus = region(net, "plus");
  const std::vector<int>& sigma = region(net, "sigma");
  const std::vector<int>& minus = region(net, "minus");
  for (int v : sigma) require(theta[v] == v, "rp_gram: involution must fix sigma");
  for (Eigen::Index k = 0; k < tests.cols(); ++k)
    for (int v : minus)
      require(tests(v, k) == 0.0, "rp_gram: test vector support crosses sigma into the minus side");

  Eigen::MatrixXd theta_f(net.n, tests.cols());
  for (int v = 0; v < net.n; ++v) theta_f.row(theta[v]) = tests.row(v);
  const Eigen::MatrixXd c = net.covariance();
  Eigen::MatrixXd gram = theta_f.transpose() * c * tests;
  gram = 0.5 * (gram + gram.transpose());
  RpReport r;
  r.closure = closure;
  r.min_eigenvalue = numerics::sym_eig_pairs(gram).values(0);

  const CnCdReport cc = cn_minus_cd_check(net, plus, sigma, closure);
  const Eigen::MatrixXd diff = cc.cn - cc.cd;
  for (Eigen::Index k = 0; k < tests.cols(); ++k) {
    Eigen::VectorXd fr(cc.vertices.size());
    for (std::size_t i = 0; i < cc.vertices.size(); ++i) fr(i) = tests(cc.vertices[i], k);
    const double lhs = 2.0 * theta_f.col(k).dot(c * tests.col(k));
    r.identity_residual = std::max(r.identity_residual, std::abs(lhs - fr.dot(diff * fr)));
  }
  return r;
}

}  // namespace speclab::gaussnet
