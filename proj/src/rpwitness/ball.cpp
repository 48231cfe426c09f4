#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/rpwitness.hpp"

namespace speclab::rpwitness {

namespace {

constexpr double kPi = std::numbers::pi;

// int psi(u) g(u) du for psi(u) = exp(-1/(1 - (u/s)^2)), via u = s tanh t.
template <class G>
double centred_bump_integral(double s, double freq, G&& g) {
  const double h = std::min(0.05, 0.3 / (1.0 + s * freq));
  const int n = static_cast<int>(std::ceil(4.5 / h));
  double acc = 0.0;
  for (int i = -n; i <= n; ++i) {
    const double c = std::cosh(i * h);
    acc += std::exp(-c * c) * s / (c * c) * g(s * std::tanh(i * h));
  }
  return acc * h;
}

double psi_cosine(double s, double xi) {
  return centred_bump_integral(s, std::abs(xi), [xi](double u) { return std::cos(xi * u); });
}

double psi_laplace(double s, double mu) {
  return centred_bump_integral(s, mu, [mu](double u) { return std::exp(-mu * u); });
}

std::vector<double> centres(int m, const BallOptions& opt) {
  std::vector<double> c(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) c[static_cast<std::size_t>(j)] = opt.offset + opt.bump_width + j * opt.spacing;
  return c;
}

void check_options(double Lambda, const BallOptions& opt) {
  require(Lambda > 0.0, "ball witness: Lambda must be positive");
  require(opt.bump_width > 0.0 && opt.spacing > 0.0 && opt.offset >= 0.0,
          "ball witness: bump_width and spacing must be positive, offset nonnegative");
}

// Transverse disk integral of 1/(1 + |xi|^2) at fixed xi_1.
double disk_weight(double Lambda, double xi1) {
  return kPi * std::log((1.0 + Lambda) / (1.0 + xi1 * xi1));
}

int nodes_for(double R, double cmax) { return 64 + 8 * static_cast<int>(std::ceil(R * (cmax + 1.0))); }

// Re(Fg(xi)^2) with Fg = -i xi Psi(xi) sum_j a_j e^{i xi c_j}.
double re_square(const std::vector<double>& a, const std::vector<double>& c, double psi, double xi) {
  double cs = 0.0, sn = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    cs += a[j] * std::cos(xi * c[j]);
    sn += a[j] * std::sin(xi * c[j]);
  }
  // Fg = xi Psi (sn - i cs)
  const double f = xi * psi;
  return f * f * (sn * sn - cs * cs);
}

double pairing_with_nodes(double Lambda, const std::vector<double>& a, const BallOptions& opt, int nodes) {
  const double R = std::sqrt(Lambda);
  const auto c = centres(static_cast<int>(a.size()), opt);
  const auto gl = numerics::gauss_legendre(nodes, 0.0, R);
  double acc = 0.0;
  for (std::size_t q = 0; q < gl.size(); ++q) {
    const double xi = gl.nodes[q];
    acc += gl.weights[q] * disk_weight(Lambda, xi) * re_square(a, c, psi_cosine(opt.bump_width, xi), xi);
  }
  return 2.0 * acc;
}

}  // namespace

double ball_target(double Lambda) {
  require(Lambda > 0.0, "ball_target: Lambda must be positive");
  const double R = std::sqrt(Lambda);
  return -(4.0 * kPi / 3.0) * (R * R * R / 3.0 - R + std::atan(R));
}

double ball_pairing(double Lambda, const std::vector<double>& coefficients, const BallOptions& opt) {
  check_options(Lambda, opt);
  require(!coefficients.empty(), "ball_pairing: empty coefficient vector");
  const auto c = centres(static_cast<int>(coefficients.size()), opt);
  return pairing_with_nodes(Lambda, coefficients, opt, nodes_for(std::sqrt(Lambda), 2.0 * c.back()));
}

double ball_pairing_uncut(double Lambda, const std::vector<double>& coefficients, const BallOptions& opt) {
  check_options(Lambda, opt);
  // For each transverse frequency r the x_1 integral against e^{-mu|x-y|}/(2 mu),
  // mu = sqrt(1 + r^2), reduces to (pi/mu) (int g e^{-mu x})^2.
  const double R = std::sqrt(Lambda);
  const auto c = centres(static_cast<int>(coefficients.size()), opt);
  const auto gl = numerics::gauss_legendre(80, 0.0, R);
  double acc = 0.0;
  for (std::size_t q = 0; q < gl.size(); ++q) {
    const double r = gl.nodes[q];
    const double mu = std::sqrt(1.0 + r * r);
    const double lpsi = psi_laplace(opt.bump_width, mu);
    double G = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) G += coefficients[j] * mu * std::exp(-mu * c[j]) * lpsi;
    acc += gl.weights[q] * r * (kPi / mu) * G * G;
  }
  return 2.0 * kPi * acc;
}

namespace {

// Real least squares for Fg ~ i xi in the norm int w |.|^2 over [-R, R].
std::vector<double> fit(double Lambda, int m, const BallOptions& opt) {
  const double R = std::sqrt(Lambda);
  const auto c = centres(m, opt);
  const auto gl = numerics::gauss_legendre(nodes_for(R, c.back()), 0.0, R);
  const auto nq = static_cast<Eigen::Index>(gl.size());
  Eigen::MatrixXd A(2 * nq, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double xi = gl.nodes[static_cast<std::size_t>(q)];
    const double s = std::sqrt(gl.weights[static_cast<std::size_t>(q)] * disk_weight(Lambda, xi));
    const double f = xi * psi_cosine(opt.bump_width, xi);
    for (int j = 0; j < m; ++j) {
      A(2 * q, j) = s * f * std::sin(xi * c[static_cast<std::size_t>(j)]);
      A(2 * q + 1, j) = -s * f * std::cos(xi * c[static_cast<std::size_t>(j)]);
    }
    b[2 * q + 1] = s * xi;
  }
  const Eigen::VectorXd a = A.completeOrthogonalDecomposition().solve(b);
  return {a.data(), a.data() + a.size()};
}

}  // namespace

WitnessCertificate fourier_ball_witness(double Lambda, int basis_size, const BallOptions& opt) {
  check_options(Lambda, opt);
  require(basis_size >= 1, "fourier_ball_witness: basis_size must be at least 1");
  WitnessCertificate cert;
  cert.construction = Construction::fourier_ball;
  cert.parameters["Lambda"] = Lambda;
  cert.parameters["basis_size"] = basis_size;
  cert.parameters["bump_width"] = opt.bump_width;
  cert.parameters["spacing"] = opt.spacing;
  cert.parameters["offset"] = opt.offset;
  cert.parameters["target"] = ball_target(Lambda);

  for (int m = 1; m <= basis_size; ++m) {
    const auto a = fit(Lambda, m, opt);
    cert.trend.push_back(ball_pairing(Lambda, a, opt));
    if (m == basis_size) cert.coefficients = a;
  }
  for (std::size_t i = 1; i < cert.trend.size(); ++i) {
    if (cert.trend[i] > cert.trend[i - 1] + 1e-10 * (1.0 + std::abs(cert.trend[i - 1]))) {
      cert.flagged = true;
      cert.note = "pairing not monotone in basis size";
      break;
    }
  }
  cert.pairing_value = cert.trend.back();
  const auto c = centres(basis_size, opt);
  const int nodes = nodes_for(std::sqrt(Lambda), 2.0 * c.back());
  cert.tolerance = std::abs(cert.pairing_value - pairing_with_nodes(Lambda, cert.coefficients, opt, nodes + nodes / 2)) +
                   1e-14 * (1.0 + std::abs(cert.pairing_value));
  cert.negative = cert.pairing_value < -cert.tolerance;
  cert.uncut_value = ball_pairing_uncut(Lambda, cert.coefficients, opt);
  cert.parameters["relative_gap"] = std::abs(cert.pairing_value - ball_target(Lambda)) / std::abs(ball_target(Lambda));
  return cert;
}

}  // namespace speclab::rpwitness
