#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/covers.hpp"
#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/zeta.hpp"

namespace speclab::covers {

namespace {

constexpr double kPi = std::numbers::pi;

double shifted_theta_sum(double t, double L, double theta, long cutoff) {
  const long centre = std::lround(-theta / (2.0 * kPi));
  return par::sum(static_cast<std::size_t>(2 * cutoff + 1), [&](std::size_t i) {
    const double k = (2.0 * kPi * (centre - cutoff + static_cast<long>(i)) + theta) / L;
    return std::exp(-t * k * k);
  });
}

// Flat torus L1 x L2 with twist theta along the first direction, through the
// Mellin route with a factorized heat trace.
double twisted_torus_log_det(double L1, double L2, double m, double theta) {
  const double ell = std::min(L1, L2);
  // Modes up to (2 pi n / L)^2 >= 37 * 160 / ell^2 make the trace exact on [ell^2/160, inf).
  const auto cutoff_for = [&](double L) { return static_cast<long>(std::ceil(14.0 * L / ell)) + 4; };
  const long c1 = cutoff_for(L1), c2 = cutoff_for(L2);
  const double m2 = m * m;
  zeta::HeatModel hm;
  hm.trace = [=](double t) {
    return std::exp(-m2 * t) * shifted_theta_sum(t, L1, theta, c1) * shifted_theta_sum(t, L2, 0.0, c2);
  };
  hm.heat = {{L1 * L2 / (4.0 * kPi), -1.0, m2}};
  hm.ell = ell;
  const double th = std::remainder(theta, 2.0 * kPi);
  const bool untwisted = std::abs(th) < 1e-14;
  hm.kernel_dim = (untwisted && m == 0.0) ? 1 : 0;
  double gap = INFINITY;
  for (long j = -2; j <= 2; ++j)
    for (long k = -1; k <= 1; ++k) {
      const double a = (2.0 * kPi * j + th) / L1, b = 2.0 * kPi * k / L2;
      const double v = a * a + b * b + m2;
      if (v > Spectrum::kKernelTol) gap = std::min(gap, v);
    }
  hm.gap = gap;
  const double k1 = 2.0 * kPi * c1 / L1, k2 = 2.0 * kPi * c2 / L2;
  hm.t_valid = 37.0 / (std::min(k1 * k1, k2 * k2) + m2);
  return zeta::log_det_mellin(hm).log_det;
}

double graph_log_det(const Eigen::VectorXd& ev, double m) {
  double acc = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double v = ev(i) + m * m;
    if (v > 1e-9) acc += std::log(v);
  }
  return acc;
}

}  // namespace

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::circle: return "circle";
    case Geometry::torus_strip: return "torus-strip";
    case Geometry::graph: return "graph";
  }
  return "?";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "circle") return Geometry::circle;
  if (s == "torus-strip" || s == "torus") return Geometry::torus_strip;
  if (s == "graph") return Geometry::graph;
  throw PreconditionError("unknown geometry '" + s + "' (expected circle, torus-strip or graph)");
}

double base_volume(const CoverSpec& spec) {
  switch (spec.geometry) {
    case Geometry::circle: return spec.L;
    case Geometry::torus_strip: return spec.L * spec.L2;
    case Geometry::graph: return spec.graph.n_vertices;
  }
  return 0.0;
}

double twisted_log_det(const CoverSpec& spec, double theta) {
  switch (spec.geometry) {
    case Geometry::circle:
      return zeta::log_det_zeta(spectra::twisted_circle_spectrum({spec.L, spec.m, theta}, 16)).log_det;
    case Geometry::torus_strip: return twisted_torus_log_det(spec.L, spec.L2, spec.m, theta);
    case Geometry::graph:
      return graph_log_det(numerics::herm_eigenvalues(spectra::twisted_laplacian(spec.graph, theta)), spec.m);
  }
  return 0.0;
}

double cover_log_det_direct(const CoverSpec& spec, int N) {
  require(N >= 1, "cover_log_det_direct: N must be positive");
  switch (spec.geometry) {
    case Geometry::circle:
      return zeta::log_det_zeta(spectra::twisted_circle_spectrum({N * spec.L, spec.m, 0.0}, 16)).log_det;
    case Geometry::torus_strip: return twisted_torus_log_det(N * spec.L, spec.L2, spec.m, 0.0);
    case Geometry::graph: {
      spectra::CoverGraph g = spec.graph;
      g.N = N;
      const Eigen::MatrixXd lap = spectra::cycle_cover_build(g).laplacian;
      return graph_log_det(numerics::sym_eig_pairs(lap).values, spec.m);
    }
  }
  return 0.0;
}

CoverFreeEnergySeq free_energy_sequence(const CoverSpec& spec, const std::vector<int>& N_list) {
  require(N_list.size() >= 2, "free_energy_sequence: need at least 2 values of N");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    require(N_list[i] >= 1, "free_energy_sequence: N must be positive");
    if (i) require(N_list[i] > N_list[i - 1], "free_energy_sequence: N list must increase");
  }
  require(spec.m >= 0.0, "free_energy_sequence: mass must be nonnegative");
  if (spec.geometry == Geometry::graph)
    require(spec.graph.n_vertices >= 2 && spectra::connected_components(spec.graph) == 1,
            "free_energy_sequence: graph base must be connected");
  else
    require(spec.L > 0.0 && spec.L2 > 0.0, "free_energy_sequence: lengths must be positive");

  CoverFreeEnergySeq seq;
  seq.N_list = N_list;
  const double vol0 = base_volume(spec);
  for (int N : N_list) {
    std::vector<double> parts(N);
    par::for_each(static_cast<std::size_t>(N),
                  [&](std::size_t p) { parts[p] = twisted_log_det(spec, 2.0 * kPi * p / N); });
    double total = 0.0;
    for (double v : parts) total += v;
    const double vol = N * vol0;
    seq.volumes.push_back(vol);
    seq.values.push_back(total / vol);
    seq.values_direct.push_back(cover_log_det_direct(spec, N) / vol);
    seq.max_pair_difference =
        std::max(seq.max_pair_difference, std::abs(seq.values.back() - seq.values_direct.back()));
  }
  if (N_list.size() >= 3 && spec.m > 0.0) {
    // Gapped families converge exponentially; a power-law fit would chase the
    // exponential corrections, so report the Cauchy tail of the sequence.
    auto& ex = seq.limit_estimate;
    ex.stage_values.assign(seq.values.end() - 3, seq.values.end());
    ex.value = seq.values.back();
    const double d1 = std::abs(ex.stage_values[1] - ex.stage_values[0]);
    const double d2 = std::abs(ex.stage_values[2] - ex.stage_values[1]);
    ex.error_estimate = d2;
    ex.converged = std::isfinite(ex.value) && (d2 < d1 || d2 < 1e-14 * (1.0 + std::abs(ex.value)));
  } else if (N_list.size() >= 3) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < N_list.size(); ++i) samples.push_back({1.0 / N_list[i], seq.values[i]});
    // log det' of the cover grows like c N + 2 log N + const, so after dividing
    // by the volume the corrections are h log(1/h) and h; h^2 absorbs the rest.
    seq.limit_estimate = numerics::extrapolate_model(
        samples, {[](double h) { return -h * std::log(h); }, [](double h) { return h; }, [](double h) { return h * h; }});
  } else {
    seq.limit_estimate.value = seq.values.back();
    seq.limit_estimate.error_estimate = INFINITY;
    seq.limit_estimate.converged = false;
  }
  return seq;
}

}  // namespace speclab::covers
