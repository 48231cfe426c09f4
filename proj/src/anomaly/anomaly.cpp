#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "local.hpp"
#include "speclab/error.hpp"

namespace speclab::anomaly {

namespace {

constexpr double kPi = std::numbers::pi;

using Integrand = std::function<double(const V3&)>;

void check_divisor(const ConicalSurfaceData& data) {
  for (const auto& d : data.divisor) {
    require(d.gamma > -1.0, "divisor exponent must exceed -1");
    require(std::abs(d.p.norm() - 1.0) < 1e-12, "divisor points must lie on the unit sphere");
  }
}

// Anomaly density of sigma relative to g = e^{2w} g_round, per unit round area.
Integrand density(const Field& sigma, const Field& w) {
  return [&sigma, &w](const V3& x) {
    const V3 gs = sigma.gradient(x) - w.gradient(x);
    const double s = sigma.value(x) - w.value(x);
    return gs.squaredNorm() + 2.0 * (1.0 - w.laplacian(x)) * s;
  };
}

// Integral of F over the sphere, with each divisor point cut at radius lo[j][angle].
// Cut-free points use the tiny inner radius.
double cut_integral(const ConicalSurfaceData& data, const Integrand& F, double R, int sphere_n,
                    const detail::PolarRule& rule, const std::vector<std::vector<double>>& lo) {
  const auto grid = sphere_grid(sphere_n);
  double total = integrate(grid, [&](const V3& x) {
    const double w = detail::outer_weight(data, x, R);
    return w == 0.0 ? 0.0 : w * F(x);
  });
  for (std::size_t j = 0; j < data.divisor.size(); ++j)
    total += detail::polar_integral(detail::PolarFrame(data.divisor[j].p), F, lo[j], R, R, rule);
  return total;
}

std::vector<std::vector<double>> uniform_cut(const ConicalSurfaceData& data, int angles, double r) {
  return std::vector<std::vector<double>>(data.divisor.size(), std::vector<double>(angles, r));
}

std::vector<std::vector<double>> eps_cut(const ConicalSurfaceData& data, int angles, double eps, double R) {
  std::vector<std::vector<double>> lo(data.divisor.size(), std::vector<double>(angles));
  for (std::size_t j = 0; j < data.divisor.size(); ++j) {
    const detail::PolarFrame f(data.divisor[j].p);
    for (int a = 0; a < angles; ++a) {
      const double r = detail::cut_radius(data.sigma, f, data.divisor[j].gamma, 2.0 * kPi * (a + 0.5) / angles, eps);
      require(r < 0.5 * R, "anomaly_renormalized: eps too large for the cone chart");
      lo[j][a] = r;
    }
  }
  return lo;
}

// Remainder of the eps-ladder. In the g-radius delta ~ eps^{1/(gamma+1)} the cut
// integral has corrections delta^k0 log delta, delta^k0, delta^{k0+1}, delta^{k0+2} log delta,
// delta^{k0+2} with k0 = 2 min(gamma, 0) + 2.
std::vector<std::function<double(double)>> remainder_basis(const ConicalSurfaceData& data) {
  std::set<std::pair<double, int>> terms;  // (power of eps, 0 = with log, 1 = plain)
  for (const auto& d : data.divisor) {
    const double unit = 1.0 / (d.gamma + 1.0);
    const double q0 = (2.0 * std::min(d.gamma, 0.0) + 2.0) * unit;
    terms.insert({q0, 0});
    terms.insert({q0, 1});
    terms.insert({q0 + unit, 1});
    terms.insert({q0 + 2.0 * unit, 0});
    terms.insert({q0 + 2.0 * unit, 1});
  }
  std::vector<std::function<double(double)>> basis;
  for (const auto& [q, plain] : terms) {
    if (plain) basis.push_back([q](double e) { return std::pow(e, q); });
    else basis.push_back([q](double e) { return std::pow(e, q) * std::log(e); });
  }
  return basis;
}

}  // namespace

AnomalyValue anomaly_smooth(const Field& sigma, const Field& reference, int resolution) {
  require(resolution >= 8, "anomaly_smooth: resolution too small");
  // sigma is relative to g here, so shift it back to the round-metric convention of density().
  const Field absolute = sigma + reference;
  const auto F = density(absolute, reference);
  double v[3];
  for (int k = 0; k < 3; ++k) v[k] = integrate(sphere_grid(resolution << k >> 1), F) / (24.0 * kPi);
  const double e_prev = std::abs(v[1] - v[0]);
  const double e_last = std::abs(v[2] - v[1]);
  const double floor = 1e-13 * (1.0 + std::abs(v[2]));
  if (e_last > floor && e_last > e_prev)
    throw NumericalError("anomaly_smooth: quadrature error does not decrease under refinement");
  AnomalyValue out;
  out.value = v[2];
  out.quadrature_error = e_last + floor;
  return out;
}

ConicalSurfaceData pullback_zd(int d) {
  require(d >= 1, "pullback_zd: degree must be positive");
  ConicalSurfaceData data;
  const double g = d - 1.0;
  const V3 south(0.0, 0.0, -1.0);
  data.divisor = {{south, g}, {infinity_point(), g}};
  const double dd = d;
  const double c0 = std::log(dd) + (2.0 - dd) * std::log(2.0);
  // Regular part -log((1+t)^d + (1-t)^d) + const in t = x_3.
  auto f = [dd, c0](double t) { return c0 - std::log(std::pow(1.0 + t, dd) + std::pow(1.0 - t, dd)); };
  auto df = [dd](double t) {
    const double a = std::pow(1.0 + t, dd), b = std::pow(1.0 - t, dd);
    const double da = dd * std::pow(1.0 + t, dd - 1.0), db = -dd * std::pow(1.0 - t, dd - 1.0);
    return -(da + db) / (a + b);
  };
  auto d2f = [dd](double t) {
    const double a = std::pow(1.0 + t, dd), b = std::pow(1.0 - t, dd);
    const double da = dd * std::pow(1.0 + t, dd - 1.0), db = -dd * std::pow(1.0 - t, dd - 1.0);
    const double dda = dd > 1.0 ? dd * (dd - 1.0) * std::pow(1.0 + t, dd - 2.0) : 0.0;
    const double ddb = dd > 1.0 ? dd * (dd - 1.0) * std::pow(1.0 - t, dd - 2.0) : 0.0;
    const double s = a + b, ds = da + db;
    return -(dda + ddb) / s + ds * ds / (s * s);
  };
  data.sigma = Field::zonal(V3::UnitZ(), f, df, d2f);
  if (d > 1) data.sigma = data.sigma + Field::log_distance(south, g) + Field::log_distance(infinity_point(), g);
  return data;
}

ConicalSurfaceData single_cone(const V3& p, double gamma) {
  ConicalSurfaceData data;
  data.divisor = {{p.normalized(), gamma}};
  data.sigma = Field::log_distance(p.normalized(), gamma);
  return data;
}

std::vector<double> default_eps_ladder(const ConicalSurfaceData& data) {
  // g-radii 0.09 * 2^{-k/2}, k = 0..5, converted to g~-radii with the leading cone asymptotics.
  std::vector<double> eps;
  for (int k = 0; k < 6; ++k) {
    const double delta = 0.09 * std::pow(2.0, -0.5 * k);
    double e = 0.5 * delta * delta;
    for (int j = 0; j < static_cast<int>(data.divisor.size()); ++j) {
      const double g = data.divisor[static_cast<std::size_t>(j)].gamma;
      e = j == 0 ? std::exp(regular_value_at(data, j)) * std::pow(delta, g + 1.0) / (g + 1.0)
                 : std::min(e, std::exp(regular_value_at(data, j)) * std::pow(delta, g + 1.0) / (g + 1.0));
    }
    eps.push_back(e);
  }
  return eps;
}

double counterterm_coefficient(const ConicalSurfaceData& data) {
  double acc = 0.0;
  for (const auto& d : data.divisor) acc += d.gamma * d.gamma / (1.0 + d.gamma);
  return 2.0 * kPi * acc;
}

AnomalyValue anomaly_renormalized(const ConicalSurfaceData& data, const std::vector<double>& eps,
                                  const RaOptions& opt) {
  check_divisor(data);
  if (data.divisor.empty()) return anomaly_smooth(data.sigma - data.reference, data.reference, opt.sphere_n);
  require(eps.size() >= 3, "anomaly_renormalized: need at least 3 eps values");
  for (std::size_t i = 0; i + 1 < eps.size(); ++i)
    require(eps[i + 1] < eps[i] && eps[i + 1] > 0.0, "anomaly_renormalized: eps list must be decreasing and positive");
  for (int j = 0; j < static_cast<int>(data.divisor.size()); ++j)
    require(regular_decay_exponent(data, j) >= 0.9, "regular potential does not decay at a cone point");

  const double R = detail::chart_radius(data, opt.chart_radius);
  const auto F = density(data.sigma, data.reference);
  const detail::PolarRule coarse{opt.angles, opt.gl};
  const detail::PolarRule fine{2 * opt.angles, opt.gl + 8};
  const double ct = counterterm_coefficient(data);

  // The outer part does not depend on eps.
  auto outer = [&](int n) {
    return integrate(sphere_grid(n), [&](const V3& x) {
      const double w = detail::outer_weight(data, x, R);
      return w == 0.0 ? 0.0 : w * F(x);
    });
  };
  const double outer_c = outer(opt.sphere_n), outer_f = outer(2 * opt.sphere_n);

  AnomalyValue out;
  std::vector<std::pair<double, double>> samples;
  for (double e : eps) {
    double inner_c = 0.0, inner_f = 0.0;
    const auto lo_c = eps_cut(data, coarse.angles, e, R);
    const auto lo_f = eps_cut(data, fine.angles, e, R);
    for (std::size_t j = 0; j < data.divisor.size(); ++j) {
      const detail::PolarFrame f(data.divisor[j].p);
      inner_c += detail::polar_integral(f, F, lo_c[j], R, R, coarse);
      inner_f += detail::polar_integral(f, F, lo_f[j], R, R, fine);
    }
    const double raw = (outer_f + inner_f) / (24.0 * kPi);
    const double err = std::abs(outer_f + inner_f - outer_c - inner_c) / (24.0 * kPi);
    out.eps.push_back(e);
    out.raw_eps.push_back(raw);
    out.ra_eps.push_back(raw + ct * std::log(e) / (24.0 * kPi));
    out.quadrature_error = std::max(out.quadrature_error, err);
    samples.emplace_back(e, out.ra_eps.back());
  }
  auto ex = numerics::extrapolate_model(samples, remainder_basis(data));
  if (!ex.converged) throw NumericalError("anomaly_renormalized: eps extrapolation did not converge");
  out.value = ex.value;
  out.epsilon_extrapolation = std::move(ex);
  return out;
}

AnomalyValue anomaly_regular_conical(const Field& h, const ConicalSurfaceData& data, int resolution) {
  check_divisor(data);
  // On the smooth part K_g~ dV_g~ = (1 - Delta sigma) dV_round and |grad h|^2 dV is conformally invariant.
  auto F = [&](const V3& x) {
    return h.gradient(x).squaredNorm() + 2.0 * (1.0 - data.sigma.laplacian(x)) * h.value(x);
  };
  double v[3];
  for (int k = 0; k < 3; ++k) v[k] = integrate(sphere_grid(resolution << k >> 1), F) / (24.0 * kPi);
  const double e_prev = std::abs(v[1] - v[0]), e_last = std::abs(v[2] - v[1]);
  const double floor = 1e-13 * (1.0 + std::abs(v[2]));
  if (e_last > floor && e_last > e_prev)
    throw NumericalError("anomaly_regular_conical: quadrature error does not decrease under refinement");
  AnomalyValue out;
  out.value = v[2];
  out.quadrature_error = e_last + floor;
  return out;
}

double conical_curvature_integral(const ConicalSurfaceData& data, int resolution) {
  return integrate(sphere_grid(resolution), [&](const V3& x) { return 1.0 - data.sigma.laplacian(x); });
}

ScalingReport conical_scaling_check(const ConicalSurfaceData& data, const Field& h, const std::vector<double>& eps,
                                    const RaOptions& opt) {
  ConicalSurfaceData scaled = data;
  scaled.sigma = data.sigma + h;
  const auto base = anomaly_renormalized(data, eps, opt);
  const auto moved = anomaly_renormalized(scaled, eps, opt);
  const auto reg = anomaly_regular_conical(h, data, opt.sphere_n);
  ScalingReport rep;
  rep.ra_base = base.value;
  rep.ra_scaled = moved.value;
  rep.regular = reg.value;
  for (const auto& d : data.divisor)
    rep.correction += d.gamma * (d.gamma + 2.0) / (d.gamma + 1.0) * h.value(d.p) / 12.0;
  // Extrapolating the difference cancels the eps-remainder shared by both ladders.
  std::vector<std::pair<double, double>> diff;
  for (std::size_t i = 0; i < eps.size(); ++i) diff.emplace_back(eps[i], moved.ra_eps[i] - base.ra_eps[i]);
  const auto ex = numerics::extrapolate_model(diff, remainder_basis(data));
  rep.converged = ex.converged && base.epsilon_extrapolation->converged && moved.epsilon_extrapolation->converged;
  rep.residual = ex.value - rep.regular + rep.correction;
  return rep;
}

CountertermFit counterterm_slope(const ConicalSurfaceData& data, const std::vector<double>& eps,
                                 const RaOptions& opt) {
  const auto ra = anomaly_renormalized(data, eps, opt);
  // Least squares for raw = a + s log eps + the leading remainder terms.
  auto rem = remainder_basis(data);
  rem.resize(std::min<std::size_t>(rem.size(), 2));
  const int n = static_cast<int>(eps.size());
  const int k = 2 + static_cast<int>(rem.size());
  require(n > k, "counterterm_slope: ladder too short for the fit");
  Eigen::MatrixXd A(n, k);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(eps[i]);
    for (std::size_t j = 0; j < rem.size(); ++j) A(i, 2 + static_cast<int>(j)) = rem[j](eps[i]);
    y[i] = ra.raw_eps[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  CountertermFit fit;
  fit.slope = coef[1];
  fit.predicted = -counterterm_coefficient(data) / (24.0 * kPi);
  fit.relative_error = std::abs(fit.slope / fit.predicted - 1.0);
  return fit;
}

namespace {

double fitted_rate(const std::vector<double>& delta, const std::vector<double>& diff) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < delta.size(); ++i)
    if (std::abs(diff[i]) > 1e-14) {
      lx.push_back(std::log(delta[i]));
      ly.push_back(std::log(std::abs(diff[i])));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::infinity();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / lx.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

void finish(AsymptoticCheck& c) {
  for (std::size_t i = 0; i < c.values.size(); ++i) c.differences.push_back(c.values[i] - c.predicted[i]);
  c.rate = fitted_rate(c.delta, c.differences);
  c.limit = c.differences.back();
  c.limit_error = std::abs(c.differences.back());
  c.flagged = !(c.rate > 0.5);
}

void check_deltas(const std::vector<double>& deltas, double R) {
  require(deltas.size() >= 2, "need at least two delta values");
  for (double d : deltas) require(d > 0.0 && d < 0.5 * R, "delta must lie below the chart scale");
}

constexpr detail::PolarRule kCheckRule{64, 20};
constexpr int kCheckGrid = 192;

}  // namespace

AsymptoticCheck annulus_check(const ConicalSurfaceData& data, int j, double Q, const std::vector<double>& deltas) {
  require(j >= 0 && j < static_cast<int>(data.divisor.size()), "divisor index out of range");
  require(Q > 1.0, "annulus_check: Q must exceed 1");
  const double R = detail::chart_radius(data, 0.0);
  check_deltas(deltas, R / Q);
  const auto& d = data.divisor[static_cast<std::size_t>(j)];
  const detail::PolarFrame f(d.p);
  AsymptoticCheck c;
  auto F = [&](const V3& x) { return data.sigma.gradient(x).squaredNorm(); };
  for (double delta : deltas) {
    c.delta.push_back(delta);
    c.values.push_back(detail::polar_integral(f, F, std::vector<double>(kCheckRule.angles, delta), Q * delta, 0.0,
                                              kCheckRule));
    c.predicted.push_back(2.0 * kPi * d.gamma * d.gamma * std::log(Q));
  }
  c.predicted_limit = c.predicted.back();
  finish(c);
  return c;
}

AsymptoticCheck green_stokes_check(const ConicalSurfaceData& data, int j, const Field& h,
                                   const std::vector<double>& deltas) {
  require(j >= 0 && j < static_cast<int>(data.divisor.size()), "divisor index out of range");
  const double R = detail::chart_radius(data, 0.0);
  check_deltas(deltas, R);
  auto F = [&](const V3& x) {
    return h.gradient(x).dot(data.sigma.gradient(x)) + h.value(x) * data.sigma.laplacian(x);
  };
  AsymptoticCheck c;
  for (double delta : deltas) {
    auto lo = uniform_cut(data, kCheckRule.angles, detail::kInnerRadius);
    lo[static_cast<std::size_t>(j)].assign(kCheckRule.angles, delta);
    c.delta.push_back(delta);
    c.values.push_back(cut_integral(data, F, R, kCheckGrid, kCheckRule, lo));
    // Points other than j keep a tiny cut, and their boundary terms survive as well.
    double pred = 0.0;
    for (const auto& e : data.divisor) pred -= 2.0 * kPi * e.gamma * h.value(e.p);
    c.predicted.push_back(pred);
  }
  c.predicted_limit = c.predicted.back();
  finish(c);
  return c;
}

AsymptoticCheck basic_renorm_check(const ConicalSurfaceData& data, const std::vector<double>& deltas) {
  check_divisor(data);
  const double R = detail::chart_radius(data, 0.0);
  check_deltas(deltas, R);
  auto grad2 = [&](const V3& x) { return data.sigma.gradient(x).squaredNorm(); };
  auto sls = [&](const V3& x) { return data.sigma.value(x) * data.sigma.laplacian(x); };
  const double bulk =
      -cut_integral(data, sls, R, kCheckGrid, kCheckRule, uniform_cut(data, kCheckRule.angles, detail::kInnerRadius));
  std::vector<double> phi0;
  for (int j = 0; j < static_cast<int>(data.divisor.size()); ++j) phi0.push_back(regular_value_at(data, j));
  AsymptoticCheck c;
  for (double delta : deltas) {
    c.delta.push_back(delta);
    c.values.push_back(cut_integral(data, grad2, R, kCheckGrid, kCheckRule, uniform_cut(data, kCheckRule.angles, delta)));
    double pred = bulk;
    for (std::size_t j = 0; j < data.divisor.size(); ++j) {
      const double g = data.divisor[j].gamma;
      pred -= 2.0 * kPi * g * g * std::log(delta) + 2.0 * kPi * g * phi0[j];
    }
    c.predicted.push_back(pred);
  }
  c.predicted_limit = c.predicted.back();
  finish(c);
  return c;
}

}  // namespace speclab::anomaly
