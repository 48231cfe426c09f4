#include <cmath>
#include <numbers>
#include <random>

#include "speclab/anomaly.hpp"
#include "speclab/error.hpp"
#include "speclab/parallel.hpp"

namespace speclab::anomaly {

V3 from_complex(std::complex<double> z) {
  const double r2 = std::norm(z);
  return V3(2.0 * z.real(), 2.0 * z.imag(), r2 - 1.0) / (r2 + 1.0);
}

V3 infinity_point() { return V3(0.0, 0.0, 1.0); }

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

struct PolyEval {
  double f = 0.0;
  V3 g = V3::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
};

// Value, Euclidean gradient and Hessian of the polynomial on R^3.
PolyEval eval_poly(const std::vector<Monomial>& terms, const V3& x) {
  PolyEval out;
  for (const Monomial& m : terms) {
    const int k[3] = {m.a, m.b, m.e};
    double p0[3], p1[3], p2[3];
    for (int i = 0; i < 3; ++i) {
      p0[i] = ipow(x[i], k[i]);
      p1[i] = k[i] >= 1 ? k[i] * ipow(x[i], k[i] - 1) : 0.0;
      p2[i] = k[i] >= 2 ? k[i] * (k[i] - 1) * ipow(x[i], k[i] - 2) : 0.0;
    }
    out.f += m.c * p0[0] * p0[1] * p0[2];
    for (int i = 0; i < 3; ++i) {
      double gi = m.c * p1[i];
      for (int j = 0; j < 3; ++j)
        if (j != i) gi *= p0[j];
      out.g[i] += gi;
      for (int j = 0; j < 3; ++j) {
        double hij = m.c;
        for (int l = 0; l < 3; ++l) {
          if (i == j) hij *= (l == i ? p2[l] : p0[l]);
          else hij *= (l == i || l == j ? p1[l] : p0[l]);
        }
        out.h(i, j) += hij;
      }
    }
  }
  return out;
}

}  // namespace

Field Field::zero() { return Field{}; }

Field Field::constant(double c) { return polynomial({Monomial{c, 0, 0, 0}}); }

Field Field::polynomial(std::vector<Monomial> terms) {
  Field f;
  f.parts_.push_back({1.0, Poly{std::move(terms)}});
  return f;
}

Field Field::log_distance(const V3& p, double gamma) {
  require(std::abs(p.norm() - 1.0) < 1e-12, "log_distance: the centre must lie on the unit sphere");
  Field f;
  f.parts_.push_back({1.0, LogDist{p, gamma}});
  return f;
}

Field Field::zonal(const V3& n, std::function<double(double)> fn, std::function<double(double)> df,
                   std::function<double(double)> d2f) {
  require(std::abs(n.norm() - 1.0) < 1e-12, "zonal: the axis must be a unit vector");
  Field f;
  f.parts_.push_back({1.0, Zonal{n, std::move(fn), std::move(df), std::move(d2f)}});
  return f;
}

Field Field::random_polynomial(int degree, double scale, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Monomial> terms;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int e = 0; a + b + e <= degree; ++e) terms.push_back({u(rng), a, b, e});
  return polynomial(std::move(terms));
}

Field Field::operator+(const Field& o) const {
  Field r = *this;
  r.parts_.insert(r.parts_.end(), o.parts_.begin(), o.parts_.end());
  return r;
}

Field Field::operator*(double s) const {
  Field r = *this;
  for (auto& [c, part] : r.parts_) c *= s;
  return r;
}

Field Field::operator-(const Field& o) const { return *this + o * -1.0; }

double Field::value(const V3& x) const {
  double acc = 0.0;
  for (const auto& [c, part] : parts_) {
    if (const auto* p = std::get_if<Poly>(&part)) {
      acc += c * eval_poly(p->terms, x).f;
    } else if (const auto* l = std::get_if<LogDist>(&part)) {
      acc += c * l->gamma * std::log((x - l->p).norm());
    } else {
      const auto& z = std::get<Zonal>(part);
      acc += c * z.f(x.dot(z.n));
    }
  }
  return acc;
}

V3 Field::gradient(const V3& x) const {
  V3 acc = V3::Zero();
  for (const auto& [c, part] : parts_) {
    if (const auto* p = std::get_if<Poly>(&part)) {
      const V3 g = eval_poly(p->terms, x).g;
      acc += c * (g - x.dot(g) * x);
    } else if (const auto* l = std::get_if<LogDist>(&part)) {
      const V3 d = x - l->p;
      acc += c * l->gamma * (d / d.squaredNorm() - 0.5 * x);
    } else {
      const auto& z = std::get<Zonal>(part);
      const double t = x.dot(z.n);
      acc += c * z.df(t) * (z.n - t * x);
    }
  }
  return acc;
}

double Field::laplacian(const V3& x) const {
  double acc = 0.0;
  for (const auto& [c, part] : parts_) {
    if (const auto* p = std::get_if<Poly>(&part)) {
      const PolyEval e = eval_poly(p->terms, x);
      acc += c * (e.h.trace() - x.dot(e.h * x) - 2.0 * x.dot(e.g));
    } else if (const auto* l = std::get_if<LogDist>(&part)) {
      acc += c * (-0.5 * l->gamma);
    } else {
      const auto& z = std::get<Zonal>(part);
      const double t = x.dot(z.n);
      acc += c * (z.d2f(t) * (1.0 - t * t) - 2.0 * t * z.df(t));
    }
  }
  return acc;
}

SphereGrid sphere_grid(int n_theta) {
  require(n_theta >= 4, "sphere_grid: need at least 4 polar nodes");
  const auto gl = numerics::gauss_legendre(n_theta, -1.0, 1.0);
  const int n_phi = 2 * n_theta;
  SphereGrid g;
  g.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  const double wphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double t = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (int k = 0; k < n_phi; ++k) {
      const double ph = wphi * (k + 0.5);
      g.nodes.emplace_back(s * std::cos(ph), s * std::sin(ph), t);
      g.weights.push_back(gl.weights[i] * wphi);
    }
  }
  return g;
}

double integrate(const SphereGrid& g, const std::function<double(const V3&)>& f) {
  return par::sum(g.nodes.size(), [&](std::size_t i) { return g.weights[i] * f(g.nodes[i]); });
}

double integrate_serial(const SphereGrid& g, const std::function<double(const V3&)>& f) {
  return par::sum_serial(g.nodes.size(), [&](std::size_t i) { return g.weights[i] * f(g.nodes[i]); });
}

}  // namespace speclab::anomaly
