#include <cmath>
#include <numbers>
#include <numeric>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/transfer.hpp"

namespace speclab::transfer {

double EvenPoly::operator()(double x) const {
  const double x2 = x * x;
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x2 + *it;
  return acc;
}

bool EvenPoly::admissible() const { return c.size() >= 2 && c.back() > 0.0; }

double TransferModel::log_entry(int i, int j) const {
  const double dx = quad.nodes[i] - quad.nodes[j];
  return log_d(i) + log_d(j) - dx * dx;
}

namespace {

Eigen::VectorXd log_diag(const EvenPoly& P, const numerics::QuadratureRule& q) {
  Eigen::VectorXd ld(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) ld(i) = 0.5 * std::log(q.weights[i]) - 0.5 * P(q.nodes[i]);
  return ld;
}

void fill_row(const numerics::QuadratureRule& q, const Eigen::VectorXd& ld, Eigen::MatrixXd& t, std::size_t i) {
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double dx = q.nodes[i] - q.nodes[j];
    t(i, j) = std::exp(ld(i) + ld(j) - dx * dx);
  }
}

}  // namespace

Eigen::MatrixXd nystrom_matrix_serial(const EvenPoly& P, const numerics::QuadratureRule& q) {
  const Eigen::VectorXd ld = log_diag(P, q);
  Eigen::MatrixXd t(q.size(), q.size());
  for (std::size_t i = 0; i < q.size(); ++i) fill_row(q, ld, t, i);
  return t;
}

Eigen::MatrixXd nystrom_matrix(const EvenPoly& P, const numerics::QuadratureRule& q) {
  const Eigen::VectorXd ld = log_diag(P, q);
  Eigen::MatrixXd t(q.size(), q.size());
  par::for_each(q.size(), [&](std::size_t i) { fill_row(q, ld, t, i); });
  return t;
}

TransferModel build_transfer(const EvenPoly& P, int grid_size, double grid_halfwidth) {
  require(!P.c.empty(), "build_transfer: empty polynomial");
  require(P.c.size() == 1 || P.c.back() > 0.0, "build_transfer: P must be bounded below (positive leading coefficient)");
  require(grid_size >= 16, "build_transfer: grid_size must be at least 16");
  require(grid_halfwidth > 0.0, "build_transfer: grid_halfwidth must be positive");
  TransferModel m;
  m.P = P;
  m.quad = numerics::gauss_legendre(grid_size, -grid_halfwidth, grid_halfwidth);
  m.log_d = log_diag(P, m.quad);
  m.T = nystrom_matrix(P, m.quad);
  // Weight of the truncated region, measured by the single-site factor at the cut.
  m.truncation_bound = std::exp(-P(grid_halfwidth));
  return m;
}

double log_partition_function(const TransferModel& m, int N) {
  require(N >= 1, "partition_function: N must be at least 1");
  const numerics::EigenPairs ep = numerics::sym_eig_pairs(m.T);
  const Eigen::VectorXd& ev = ep.values;
  const double top = ev(ev.size() - 1);
  double acc = 0.0;
  for (int i = 0; i < ev.size(); ++i) acc += std::pow(ev(i) / top, N);
  return N * std::log(top) + std::log(acc);
}

double partition_function(const TransferModel& m, int N) { return std::exp(log_partition_function(m, N)); }

TopEigen top_eigenpair(const Eigen::MatrixXd& t) {
  const numerics::EigenPairs ep = numerics::sym_eig_pairs(t);
  const int n = static_cast<int>(ep.values.size());
  TopEigen out;
  out.lambda0 = ep.values(n - 1);
  out.lambda1 = n > 1 ? std::max(std::abs(ep.values(n - 2)), std::abs(ep.values(0))) : 0.0;
  out.alpha = out.lambda1 / out.lambda0;
  if (!(out.lambda0 > 0.0) || out.lambda0 - out.lambda1 <= 1e-10 * out.lambda0)
    throw NumericalError("top_eigenpair: top eigenvalue is not simple (degenerate gap)");
  out.omega0 = ep.vectors.col(n - 1);
  if (out.omega0.sum() < 0.0) out.omega0 = -out.omega0;
  out.y = out.omega0;
  out.positive = (out.omega0.array() > 0.0).all();
  return out;
}

TopEigen top_eigenpair(const TransferModel& m) {
  TopEigen out = top_eigenpair(m.T);
  // Certify positivity in factored form: omega0 = D y with y the Perron vector
  // of Kg D^2. Power iteration from |omega0| / D keeps every entry a sum of
  // positive terms, so positivity is exact in floating point.
  const int n = static_cast<int>(m.T.rows());
  Eigen::MatrixXd kg(n, n);
  Eigen::VectorXd d2(n);
  for (int i = 0; i < n; ++i) {
    d2(i) = std::exp(2.0 * m.log_d(i));
    for (int j = 0; j < n; ++j) {
      const double dx = m.quad.nodes[i] - m.quad.nodes[j];
      kg(i, j) = std::exp(-dx * dx);
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    const double d = std::exp(m.log_d(i));
    if (d > 1e-150 && std::abs(out.omega0(i)) > 1e-300) y(i) = std::abs(out.omega0(i)) / d;
  }
  for (int it = 0; it < 400; ++it) {
    Eigen::VectorXd next = kg * d2.cwiseProduct(y);
    next /= next.maxCoeff();
    const double change = ((next - y).cwiseAbs().array() / next.array()).maxCoeff();
    y = next;
    if (change < 1e-15) break;
  }
  out.y = y;
  out.positive = (y.array() > 0.0).all() && y.allFinite();
  return out;
}

double gibbs_expectation(const TransferModel& m, const GibbsQuery& q) {
  require(!q.observables.empty(), "gibbs_expectation: empty observables");
  require(q.observables.size() == q.positions.size(), "gibbs_expectation: one position per observable");
  require(q.N >= 1, "gibbs_expectation: N must be at least 1");
  for (std::size_t k = 0; k < q.positions.size(); ++k) {
    require(q.positions[k] >= 1 && q.positions[k] <= q.N, "gibbs_expectation: position out of range");
    if (k) require(q.positions[k] > q.positions[k - 1], "gibbs_expectation: positions must increase");
    require(q.observables[k].size() == m.T.rows(), "gibbs_expectation: observable size mismatch");
  }
  // Work in the eigenbasis with powers normalized by lambda_0 to avoid overflow.
  const numerics::EigenPairs ep = numerics::sym_eig_pairs(m.T);
  const double top = ep.values(ep.values.size() - 1);
  const Eigen::VectorXd ratio = ep.values / top;
  auto power = [&](int k) {
    Eigen::VectorXd r(ratio.size());
    for (int i = 0; i < ratio.size(); ++i) r(i) = std::pow(ratio(i), k);
    return Eigen::MatrixXd(ep.vectors * r.asDiagonal() * ep.vectors.transpose());
  };
  Eigen::MatrixXd prod = power(q.positions[0] - 1);
  for (std::size_t k = 0; k < q.positions.size(); ++k) {
    prod = q.observables[k].asDiagonal() * prod;
    const int next = (k + 1 < q.positions.size()) ? q.positions[k + 1] : q.N + q.positions[0];
    prod = power(next - q.positions[k]) * prod;
  }
  double z = 0.0;
  for (int i = 0; i < ratio.size(); ++i) z += std::pow(ratio(i), q.N);
  return prod.trace() / z;
}

double mixing_check(const TransferModel& m, const Eigen::VectorXd& f, const Eigen::VectorXd& g, int k_max) {
  require(f.size() == m.T.rows() && g.size() == m.T.rows(), "mixing_check: vector size mismatch");
  require(k_max >= 0, "mixing_check: k_max must be nonnegative");
  const numerics::EigenPairs ep = numerics::sym_eig_pairs(m.T);
  const int n = static_cast<int>(ep.values.size());
  const double top = ep.values(n - 1);
  const TopEigen te = top_eigenpair(m.T);
  const Eigen::VectorXd a = ep.vectors.transpose() * f;
  const Eigen::VectorXd b = ep.vectors.transpose() * g;
  const double norms = f.norm() * g.norm();
  double worst = -INFINITY;
  for (int k = 0; k <= k_max; ++k) {
    // <F, U^k G> minus its projection on the ground state: the i < n-1 modes.
    double rest = 0.0;
    for (int i = 0; i < n - 1; ++i) rest += std::pow(ep.values(i) / top, k) * a(i) * b(i);
    worst = std::max(worst, std::abs(rest) - std::pow(te.alpha, k) * norms);
  }
  return worst;
}

FreeEnergyResult free_energy_density(const TransferModel& m, const std::vector<int>& N_list) {
  require(!N_list.empty(), "free_energy_density: empty N list");
  if (!m.P.admissible())
    throw NumericalError(
        "free_energy_density: P has no confining term; the kernel is not trace class on the line "
        "and the free energy diverges as the grid widens");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    require(N_list[i] > N_list[i - 1], "free_energy_density: N list must increase");
  FreeEnergyResult r;
  r.N = N_list;
  const TopEigen te = top_eigenpair(m.T);
  r.limit = std::log(te.lambda0);
  std::vector<double> xs, ys;
  for (int n : N_list) {
    const double v = log_partition_function(m, n) / n;
    r.values.push_back(v);
    const double diff = std::abs(v - r.limit);
    if (diff > 1e-14) {
      xs.push_back(n);
      ys.push_back(std::log(diff));
    }
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    r.fit_rate = std::exp(slope);
    r.fit_c = std::exp(my - slope * mx);
  }
  return r;
}

double gaussian_chain_log_z(int N, double m) {
  require(N >= 1, "gaussian_chain_log_z: N must be at least 1");
  double acc = 0.5 * N * std::log(std::numbers::pi);
  for (int k = 0; k < N; ++k) acc -= 0.5 * std::log(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / N) + m * m);
  return acc;
}

}  // namespace speclab::transfer
