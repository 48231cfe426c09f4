#include <cmath>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"

namespace speclab::numerics {

namespace {

void check_symmetric(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols(), "sym_eig: matrix must be square");
  require(a.allFinite(), "sym_eig: non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * scale, "sym_eig: matrix is not symmetric");
}

}  // namespace

EigenPairs sym_eig_pairs(const Eigen::MatrixXd& a) {
  check_symmetric(a);
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver failed");
  EigenPairs out{es.eigenvalues(), es.eigenvectors()};
  if (a.rows() > 0) {
    const double norm = std::max(sym.cwiseAbs().maxCoeff(), out.values.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd res = sym * out.vectors - out.vectors * out.values.asDiagonal();
    const double worst = res.colwise().norm().maxCoeff();
    if (worst > 1e-10 * std::max(norm, 1e-300))
      throw NumericalError("sym_eig: residual check failed");
  }
  return out;
}

Spectrum sym_eig(const Eigen::MatrixXd& a) {
  const EigenPairs p = sym_eig_pairs(a);
  Spectrum sp;
  sp.eigenvalues.assign(p.values.data(), p.values.data() + p.values.size());
  sp.normalize();
  return sp;
}

Eigen::VectorXd herm_eigenvalues(const Eigen::MatrixXcd& a) {
  require(a.rows() == a.cols(), "herm_eigenvalues: matrix must be square");
  require(a.allFinite(), "herm_eigenvalues: non-finite entries");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  require((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "herm_eigenvalues: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("herm_eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

}  // namespace speclab::numerics
