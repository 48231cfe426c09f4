#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/covers.hpp"
#include "speclab/error.hpp"

namespace speclab::covers {

namespace {
constexpr double kPi = std::numbers::pi;
}

TwistedFamily circle_family(double L, double m) {
  require(L > 0.0, "circle_family: L must be positive");
  return [L, m](double theta) {
    std::vector<double> ev;
    const long centre = std::lround(-theta / (2.0 * kPi));
    for (long n = centre - 3; n <= centre + 3; ++n) {
      const double k = (2.0 * kPi * n + theta) / L;
      ev.push_back(k * k + m * m);
    }
    std::sort(ev.begin(), ev.end());
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size())));
  };
}

TwistedFamily graph_family(const spectra::CoverGraph& g, double m) {
  require(g.n_vertices >= 2, "graph_family: need at least 2 vertices");
  return [g, m](double theta) {
    Eigen::VectorXd ev = numerics::herm_eigenvalues(spectra::twisted_laplacian(g, theta));
    return Eigen::VectorXd(ev.array() + m * m);
  };
}

std::vector<double> symmetric_theta_grid(int half_points) {
  require(half_points >= 4, "symmetric_theta_grid: need at least 4 points per side");
  std::vector<double> grid;
  for (int i = -half_points; i <= half_points; ++i) grid.push_back(kPi * i / half_points);
  return grid;
}

Lambda0Curve lambda0_analysis(const TwistedFamily& family, const std::vector<double>& theta_grid, double eta) {
  require(theta_grid.size() >= 5, "lambda0_analysis: grid too small");
  require(eta > 0.0, "lambda0_analysis: eta must be positive");
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    require(std::abs(theta_grid[i] + theta_grid[theta_grid.size() - 1 - i]) < 1e-14,
            "lambda0_analysis: grid must be symmetric about 0");
    if (i) require(theta_grid[i] > theta_grid[i - 1], "lambda0_analysis: grid must increase");
  }
  Lambda0Curve c;
  c.theta_grid = theta_grid;
  c.eta = eta;
  for (double th : theta_grid) {
    const Eigen::VectorXd ev = family(th);
    require(ev.size() >= 2, "lambda0_analysis: family must return at least two eigenvalues");
    c.values.push_back(ev(0));
    c.lambda1.push_back(ev(1));
  }
  c.eps0 = 0.5 * *std::min_element(c.lambda1.begin(), c.lambda1.end());

  // Log-log regression on 0 < |theta| <= eta.
  std::vector<double> xs, ys, ths;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double th = std::abs(theta_grid[i]);
    if (th > 0.0 && th <= eta + 1e-15) {
      if (!(c.values[i] > 0.0)) {
        c.flagged = true;
        c.note = "lambda_0 vanishes at nonzero twist";
        return c;
      }
      xs.push_back(std::log(th));
      ys.push_back(std::log(c.values[i]));
      ths.push_back(th);
    }
  }
  if (xs.size() < 3) {
    c.flagged = true;
    c.note = "fewer than 3 grid points in the fit window";
    return c;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  c.slope = sxy / sxx;
  c.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  c.p = static_cast<int>(std::lround(c.slope / 2.0));
  if (c.p < 1 || c.r2 < 0.999 || std::abs(c.slope - 2.0 * c.p) > 0.1) {
    c.flagged = true;
    c.note = "lambda_0 is not a clean power law on the fit window";
    return c;
  }

  // a: limit of lambda_0 / theta^{2p} as theta -> 0, extrapolated in theta^2.
  // b: the smallest ratio on the window, a valid lower bound there.
  std::vector<std::pair<double, double>> samples;
  c.b = INFINITY;
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double th = theta_grid[i];
    if (th > 0.0 && th <= eta + 1e-15) {
      const double ratio = c.values[i] / std::pow(th, 2 * c.p);
      samples.push_back({th, ratio});
      c.b = std::min(c.b, ratio);
    }
  }
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    const double th = std::abs(theta_grid[i]);
    if (th > 0.0 && th <= eta + 1e-15) c.b = std::min(c.b, c.values[i] / std::pow(th, 2 * c.p));
  }
  std::reverse(samples.begin(), samples.end());  // decreasing theta
  if (samples.size() >= 3) {
    const auto ex = numerics::extrapolate_model(
        samples, {[](double h) { return h * h; }, [](double h) { return h * h * h * h; }});
    c.a = ex.value;
  } else {
    c.a = samples.back().second;
  }
  // The lower bound can never exceed the leading coefficient.
  c.b = std::min(c.b, c.a);
  return c;
}

}  // namespace speclab::covers
