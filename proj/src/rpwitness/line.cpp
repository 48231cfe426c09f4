#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/parallel.hpp"
#include "speclab/rpwitness.hpp"

namespace speclab::rpwitness {

namespace {

constexpr double kCentre = std::numbers::pi / 2.0;
constexpr double kHalfWidth = 0.4;

// x = centre + w tanh(s) turns the bump into exp(-cosh^2 s) w sech^2 s, which the
// trapezoid rule integrates to machine precision.
template <class F>
double bump_integral(F&& g, double xi_scale) {
  const double h = std::min(0.05, 0.3 / (1.0 + kHalfWidth * xi_scale));
  const int n = static_cast<int>(std::ceil(4.5 / h));
  double acc = 0.0;
  for (int i = -n; i <= n; ++i) {
    const double s = i * h;
    const double c = std::cosh(s);
    const double x = kCentre + kHalfWidth * std::tanh(s);
    acc += std::exp(-c * c) * kHalfWidth / (c * c) * g(x);
  }
  return acc * h;
}

double pairing_quadrature(int n, double kappa, int nodes) {
  const auto gl = numerics::gauss_legendre(nodes, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t q = 0; q < gl.size(); ++q) {
    const double xi = gl.nodes[q];
    const auto t = bump_transform(xi);
    acc += gl.weights[q] * std::pow(xi, 4 * n) * (t.A * t.A - t.B * t.B) / (xi * xi + kappa);
  }
  return 2.0 * acc;
}

double pairing_tolerance(int n, double kappa, double value) {
  return std::abs(value - pairing_quadrature(n, kappa, 200)) + 1e-14 * (1.0 + std::abs(value));
}

// Smallest n in [0, n_max] whose pairing is certified negative, or -1.
int first_negative(const std::vector<double>& trend, int n_max, double kappa) {
  for (int n = 0; n <= n_max; ++n)
    if (trend[static_cast<std::size_t>(n)] < -pairing_tolerance(n, kappa, trend[static_cast<std::size_t>(n)]))
      return n;
  return -1;
}

std::vector<double> pairing_trend(int n_max, double kappa) {
  std::vector<double> trend(static_cast<std::size_t>(n_max + 1));
  par::for_each(trend.size(), [&](std::size_t n) { trend[n] = line_pairing(static_cast<int>(n), kappa); });
  return trend;
}

}  // namespace

double bump(double x) {
  const double u = (x - kCentre) / kHalfWidth;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

BumpTransform bump_transform(double xi) {
  BumpTransform t;
  t.A = bump_integral([xi](double x) { return std::cos(xi * x); }, std::abs(xi));
  t.B = bump_integral([xi](double x) { return std::sin(xi * x); }, std::abs(xi));
  return t;
}

double bump_laplace(double mu) {
  return bump_integral([mu](double x) { return std::exp(-mu * x); }, 0.0);
}

double line_pairing(int n, double kappa) {
  require(kappa > 0.0, "line_pairing: kappa must be positive");
  require(n >= 0, "line_pairing: n must be nonnegative");
  return pairing_quadrature(n, kappa, 300);
}

double line_pairing_uncut(int n, double kappa) {
  require(kappa > 0.0, "line_pairing_uncut: kappa must be positive");
  // The resolvent kernel e^{-a|x-y|}/(2a), a = sqrt(kappa), pairs Theta h with h
  // through e^{-a(x+y)}, and int phi^{(2n)} e^{-a x} = a^{2n} int phi e^{-a x}.
  const double a = std::sqrt(kappa);
  const double m = std::pow(a, 2 * n) * bump_laplace(a);
  return std::numbers::pi / a * m * m;
}

double line_pairing_uncut_fourier(int n, double kappa) {
  require(kappa > 0.0, "line_pairing_uncut_fourier: kappa must be positive");
  std::vector<double> edges;
  for (double e = 0.0; e <= 400.0; e += 1.0) edges.push_back(e);
  const auto rule = numerics::composite_legendre(edges, 20);
  const double acc = par::sum(rule.size(), [&](std::size_t q) {
    const double xi = rule.nodes[q];
    const auto t = bump_transform(xi);
    return rule.weights[q] * std::pow(xi, 4 * n) * (t.A * t.A - t.B * t.B) / (xi * xi + kappa);
  });
  return 2.0 * acc;
}

WitnessCertificate line_witness(double kappa, int n_max) {
  require(kappa > 0.0, "line_witness: kappa must be positive");
  require(n_max >= 0, "line_witness: n_max must be nonnegative");
  WitnessCertificate c;
  c.construction = Construction::line_derivative;
  c.parameters["kappa"] = kappa;
  c.parameters["n_max"] = n_max;
  c.trend = pairing_trend(n_max, kappa);
  const int n = first_negative(c.trend, n_max, kappa);
  if (n < 0) {
    c.flagged = true;
    c.note = "no negative pairing for n <= n_max";
    c.parameters["n"] = n_max;
    c.pairing_value = c.trend.back();
  } else {
    c.parameters["n"] = n;
    c.pairing_value = c.trend[static_cast<std::size_t>(n)];
  }
  const int used = static_cast<int>(c.parameters["n"]);
  c.tolerance = pairing_tolerance(used, kappa, c.pairing_value);
  c.negative = c.pairing_value < -c.tolerance;
  c.uncut_value = line_pairing_uncut(used, kappa);
  return c;
}

WitnessCertificate cylinder_witness(double Lambda, double L, int n, int n_max) {
  require(Lambda >= 1.0, "cylinder_witness: Lambda must be at least 1");
  require(L > 0.0, "cylinder_witness: slice length must be positive");
  const double kappa = 1.0 / Lambda;
  WitnessCertificate c;
  c.construction = Construction::cylinder;
  c.parameters["Lambda"] = Lambda;
  c.parameters["L"] = L;
  // chi is the unit constant mode, so its spectral measure is a unit mass at 0.
  const double scale = std::sqrt(Lambda);
  if (n < 0) {
    c.trend = pairing_trend(n_max, kappa);
    for (double& v : c.trend) v *= scale;
    std::vector<double> raw(c.trend.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = c.trend[i] / scale;
    n = first_negative(raw, n_max, kappa);
    if (n < 0) {
      c.flagged = true;
      c.note = "no negative pairing for n <= n_max";
      n = n_max;
    }
  }
  c.parameters["n"] = n;
  const double line = line_pairing(n, kappa);
  c.pairing_value = scale * line;
  c.tolerance = scale * pairing_tolerance(n, kappa, line);
  c.negative = c.pairing_value < -c.tolerance;
  c.uncut_value = scale * line_pairing_uncut(n, kappa);
  return c;
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::line_derivative: return "line";
    case Construction::cylinder: return "cylinder";
    case Construction::compact_dual: return "compact";
    case Construction::fourier_ball: return "ball";
  }
  return "line";
}

Construction construction_from_string(const std::string& s) {
  if (s == "line") return Construction::line_derivative;
  if (s == "cylinder") return Construction::cylinder;
  if (s == "compact") return Construction::compact_dual;
  if (s == "ball") return Construction::fourier_ball;
  throw PreconditionError("unknown construction '" + s + "' (expected line, cylinder, compact or ball)");
}

double reevaluate(const WitnessCertificate& cert) {
  const auto& p = cert.parameters;
  auto get = [&](const char* k) {
    const auto it = p.find(k);
    require(it != p.end(), std::string("certificate lacks parameter ") + k);
    return it->second;
  };
  switch (cert.construction) {
    case Construction::line_derivative:
      return line_pairing(static_cast<int>(get("n")), get("kappa"));
    case Construction::cylinder:
      return std::sqrt(get("Lambda")) * line_pairing(static_cast<int>(get("n")), 1.0 / get("Lambda"));
    case Construction::compact_dual: {
      const double Lambda = get("Lambda");
      const int K = static_cast<int>(std::floor(std::sqrt(Lambda) + 1e-12));
      const auto m = compact_moments(cert.coefficients, get("margin"), K);
      double acc = m[0] * m[0];
      for (int k = 1; k <= K; ++k) {
        const double w = 1.0 / (k * k + 1.0);
        acc += w * (m[2 * k - 1] * m[2 * k - 1] - m[2 * k] * m[2 * k]);
      }
      return acc;
    }
    case Construction::fourier_ball: {
      BallOptions o;
      o.bump_width = get("bump_width");
      o.spacing = get("spacing");
      o.offset = get("offset");
      return ball_pairing(get("Lambda"), cert.coefficients, o);
    }
  }
  return 0.0;
}

}  // namespace speclab::rpwitness
