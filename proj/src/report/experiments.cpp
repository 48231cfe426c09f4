#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "speclab/anomaly.hpp"
#include "speclab/covers.hpp"
#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"
#include "speclab/numerics.hpp"
#include "speclab/parallel.hpp"
#include "speclab/report.hpp"
#include "speclab/rpwitness.hpp"
#include "speclab/spectra.hpp"
#include "speclab/transfer.hpp"
#include "speclab/zeta.hpp"

namespace speclab::report {

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<int> to_int(const std::vector<long>& v) { return {v.begin(), v.end()}; }

// ---- spectra ------------------------------------------------------------------

void spectra_circle(const Params& p, std::uint64_t, ExperimentReport& r) {
  const spectra::TwistedCircle c{p.number("L", 2 * kPi), p.number("m", 0.0), p.number("theta", 0.0)};
  const long n_max = p.integer("n_max", 40);
  const Spectrum sp = spectra::twisted_circle_spectrum(c, n_max);
  // Oracle: direct enumeration over a wider index range, cut at the completeness bound.
  std::vector<double> want, have;
  for (long n = -3 * n_max - 3; n <= 3 * n_max + 3; ++n) {
    const double k = (2 * kPi * n + c.theta) / c.L;
    const double lam = k * k + c.m * c.m;
    if (lam < sp.truncation.complete_below) want.push_back(lam);
  }
  for (double v : sp.eigenvalues)
    if (v < sp.truncation.complete_below) have.push_back(v);
  r.check("count_mismatch", std::abs(static_cast<double>(want.size()) - static_cast<double>(have.size())), 0.0);
  if (want.size() == have.size()) r.check("eigenvalue_linf", sorted_linf_distance(want, have), 1e-10);
  r.outputs["smallest"] = sp.eigenvalues.front();
  r.outputs["kernel_dim"] = sp.kernel_dim;
  r.outputs["complete_below"] = sp.truncation.complete_below;
  r.details["spectrum"] = spectra::to_json(sp);
}

spectra::CoverGraph cover_base(const Params& p, std::uint64_t seed) {
  const std::string base = p.text("base", "cycle");
  const int n = static_cast<int>(p.integer("n", 3));
  const int N = static_cast<int>(p.integer("N", 6));
  if (base == "cycle") return spectra::cycle_base(n, N);
  if (base == "random")
    return spectra::random_base(n, p.number("p", 0.4), static_cast<unsigned>(p.integer("graph_seed", static_cast<long>(seed))), N);
  throw PreconditionError("base must be cycle or random, got '" + base + "'");
}

std::vector<double> union_of_blocks(const spectra::CoverGraph& g) {
  std::vector<double> out;
  for (const auto& b : spectra::twisted_block_decompose(g)) {
    const Eigen::VectorXd ev = numerics::herm_eigenvalues(b);
    out.insert(out.end(), ev.data(), ev.data() + ev.size());
  }
  return out;
}

void spectra_cover(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  const auto g = cover_base(p, seed);
  const Spectrum cover = numerics::sym_eig(spectra::cycle_cover_build(g).laplacian);
  const double d = sorted_linf_distance(cover.eigenvalues, union_of_blocks(g));
  r.check("block_union_linf", d, p.number("tol", 1e-10));
  r.outputs["vertices"] = g.n_vertices * g.N;
  r.outputs["edges"] = static_cast<double>(g.edges.size()) * g.N;
}

// ---- zeta -----------------------------------------------------------------------

void zeta_circle(const Params& p, std::uint64_t, ExperimentReport& r) {
  const spectra::TwistedCircle c{p.number("L", 2 * kPi), p.number("m", 1.0), p.number("theta", 0.0)};
  const Spectrum sp = spectra::twisted_circle_spectrum(c, p.integer("n_max", 80));
  const bool zero_mode = c.m == 0.0 && std::abs(std::remainder(c.theta, 2 * kPi)) < 1e-15;
  // Closed forms: primed massless determinant L^2, otherwise the Chebyshev product.
  const double closed = zero_mode ? c.L * c.L : 2.0 * std::cosh(c.m * c.L) - 2.0 * std::cos(c.theta);
  const double tol = p.number("tol", 1e-8);
  const double d_default = zeta::det_zeta(sp);
  const double d_mellin = zeta::det_zeta(sp, zeta::Method::mellin_split);
  r.outputs["det"] = d_default;
  r.outputs["det_mellin"] = d_mellin;
  r.outputs["closed_form"] = closed;
  r.check("relative_error", rel(d_default, closed), tol);
  r.check("relative_error_mellin", rel(d_mellin, closed), tol);
}

void zeta_cover_product(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double L = p.number("L", 1.0), m = p.number("m", 0.0);
  const long n_max = p.integer("n_max", 60);
  double worst = 0.0;
  json rows = json::array();
  for (long N : p.integers("N", {1, 2, 3, 5, 8, 12})) {
    require(N >= 1, "cover degree must be positive");
    const double cover = zeta::log_det_zeta(spectra::twisted_circle_spectrum({N * L, m, 0.0}, n_max * N)).log_det;
    double product = 0.0;
    for (long q = 0; q < N; ++q)
      product += zeta::log_det_zeta(spectra::twisted_circle_spectrum({L, m, 2 * kPi * q / N}, n_max)).log_det;
    const double e = std::abs(std::expm1(cover - product));
    worst = std::max(worst, e);
    rows.push_back({{"N", N}, {"log_det_cover", cover}, {"log_det_product", product}});
  }
  r.check("product_relative_error", worst, p.number("tol", 1e-8));
  r.details["rows"] = rows;
}

void zeta_bfk(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto b = zeta::bfk_torus_check(p.number("L1", 2 * kPi), p.number("L2", 2 * kPi), p.number("m", 1.0),
                                       p.integer("cutoff", 1024));
  r.outputs["log_det_torus"] = b.log_det_torus;
  r.outputs["log_det_dirichlet"] = b.log_det_dirichlet;
  r.outputs["log_det_dn"] = b.log_det_dn;
  r.outputs["lhs"] = b.lhs;
  r.outputs["rhs"] = b.rhs;
  r.outputs["constant_offset"] = b.constant_offset;
  r.outputs["tail_bound"] = b.tail_bound;
  r.outputs["error_estimate"] = b.error_estimate;
  r.check("identity_residual", b.residual, p.number("tol", 1e-5));
  r.check("torus_two_regularizations", std::abs(b.log_det_torus - b.log_det_torus_modes), 1e-8);
}

// ---- transfer -------------------------------------------------------------------

transfer::EvenPoly poly(const Params& p, std::vector<double> fallback) {
  return transfer::EvenPoly{p.numbers("P", fallback)};
}

// Integral of exp(-s^T A s) for the periodic chain, from a Cholesky factorization.
double dense_chain_log_z(int n, double m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) += 2.0 + m * m;
    a(i, (i + 1) % n) -= 1.0;
    a((i + 1) % n, i) -= 1.0;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, "chain form is not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return 0.5 * n * std::log(kPi) - 0.5 * logdet;
}

void transfer_gaussian(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double m = p.number("m", 1.0);
  require(m > 0.0, "transfer-gaussian needs m > 0");
  const auto model = transfer::build_transfer(transfer::EvenPoly{{0.0, m * m}}, static_cast<int>(p.integer("grid", 200)));
  double worst = 0.0;
  json rows = json::array();
  for (long N : p.integers("N", {8, 32, 64})) {
    const double z = transfer::log_partition_function(model, static_cast<int>(N));
    const double oracle = dense_chain_log_z(static_cast<int>(N), m);
    worst = std::max(worst, std::abs(std::expm1(z - oracle)));
    rows.push_back({{"N", N}, {"log_z", z}, {"log_z_oracle", oracle}});
  }
  r.check("partition_relative_error", worst, p.number("tol", 1e-8));
  // 1/2 log pi - 1/2 int_0^1 log(2 - 2 cos 2 pi x + m^2) dx by a periodic trapezoid rule.
  const auto q = numerics::periodic_trapezoid(4096, 0.0, 1.0);
  const double density = 0.5 * std::log(kPi) -
                         0.5 * q.integrate([m](double x) { return std::log(2.0 - 2.0 * std::cos(2 * kPi * x) + m * m); });
  const auto fe = transfer::free_energy_density(model, {2, 4, 8, 16, 32, 64});
  r.outputs["free_energy_limit"] = fe.limit;
  r.outputs["free_energy_oracle"] = density;
  r.check("free_energy_error", std::abs(fe.values.back() - density), p.number("free_energy_tol", 1e-6));
  r.details["rows"] = rows;
}

void transfer_mixing(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  const auto model = transfer::build_transfer(poly(p, {0.0, 0.0, 1.0}), static_cast<int>(p.integer("grid", 200)));
  const auto te = transfer::top_eigenpair(model);
  r.require_true("ground_state_positive", te.positive);
  r.check("alpha_below_one", std::max(0.0, te.alpha - 1.0 + 1e-15), 0.0);
  r.outputs["alpha"] = te.alpha;
  r.outputs["lambda0"] = te.lambda0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst = -INFINITY;
  const long pairs = p.integer("pairs", 20);
  const int k_max = static_cast<int>(p.integer("k_max", 50));
  for (long t = 0; t < pairs; ++t) {
    Eigen::VectorXd f(model.T.rows()), h(model.T.rows());
    for (int i = 0; i < f.size(); ++i) {
      f(i) = g(rng);
      h(i) = g(rng);
    }
    worst = std::max(worst, transfer::mixing_check(model, f, h, k_max));
  }
  r.outputs["max_mixing_excess"] = worst;
  r.check("mixing_slack", std::max(0.0, worst), p.number("tol", 1e-10));
}

void transfer_mcmc(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  const auto P = poly(p, {0.0, 0.0, 1.0});
  const int N = static_cast<int>(p.integer("N", 32));
  const auto est = transfer::mcmc_free_energy(P, N, p.integer("steps", 1000000), seed,
                                              static_cast<int>(p.integer("nodes", 8)));
  const double exact = transfer::log_partition_function(transfer::build_transfer(P), N) / N;
  r.outputs["mcmc"] = est.value;
  r.outputs["mcmc_stderr"] = est.standard_error;
  r.outputs["transfer"] = exact;
  r.outputs["acceptance"] = est.mean_acceptance;
  r.check("difference", std::abs(est.value - exact), p.number("sigmas", 3.0) * est.standard_error);
}

// ---- covers ---------------------------------------------------------------------

void covers_heat_trace(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double L = p.number("L", 2 * kPi);
  std::vector<double> ts = p.numbers("t", {});
  if (ts.empty())
    for (int i = 0; i <= 24; ++i) ts.push_back(0.05 * std::pow(2000.0, i / 24.0));
  double worst = 0.0;
  for (long N : p.integers("N", {1, 2, 3, 4, 7, 8, 16, 31, 32, 64}))
    for (double t : ts) worst = std::max(worst, covers::heat_trace_cover(L, static_cast<int>(N), t).difference);
  r.check("deck_identity", worst, p.number("tol", 1e-10));
}

void covers_free_energy(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  covers::CoverSpec s;
  s.geometry = covers::geometry_from_string(p.text("geometry", "circle"));
  s.m = p.number("m", 0.0);
  s.L = p.number("L", s.geometry == covers::Geometry::torus_strip ? 2 * kPi : 1.0);
  s.L2 = p.number("L2", 2 * kPi);
  if (s.geometry == covers::Geometry::graph) s.graph = cover_base(p, seed);
  const auto ns = to_int(p.integers("N", {2, 4, 8, 16, 32, 64}));
  const auto seq = covers::free_energy_sequence(s, ns);
  r.outputs["limit"] = seq.limit_estimate.value;
  r.outputs["limit_error_estimate"] = seq.limit_estimate.error_estimate;
  r.check("two_routes", seq.max_pair_difference, p.number("pair_tol", 1e-6));
  if (s.geometry == covers::Geometry::circle) {
    // Massless: log(NL)^2 / (NL) -> 0. Massive: log(4 sinh^2(N m L / 2)) / (NL) -> m.
    const double closed = s.m;
    r.outputs["limit_closed_form"] = closed;
    r.check("limit_error", std::abs(seq.limit_estimate.value - closed), p.number("tol", s.m == 0.0 ? 1e-6 : 1e-8));
  }
  if (s.geometry != covers::Geometry::graph) r.require_true("converged", seq.limit_estimate.converged);
  json rows = json::array();
  for (std::size_t i = 0; i < ns.size(); ++i)
    rows.push_back({{"N", ns[i]}, {"value", seq.values[i]}, {"value_direct", seq.values_direct[i]}});
  r.details["rows"] = rows;
}

void covers_heat_bound(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double L = p.number("L", 2 * kPi);
  const int n_max = static_cast<int>(p.integer("N_max", 64));
  const auto fam = covers::circle_family(L);
  const auto curve = covers::lambda0_analysis(fam, covers::symmetric_theta_grid(64));
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(std::pow(100.0, i / 40.0));
  std::vector<int> ns;
  for (int n = 1; n <= n_max; ++n) ns.push_back(n);
  const auto hb = covers::small_eigen_heat_bound(fam, curve, ts, ns);
  r.outputs["c4"] = hb.c4;
  r.outputs["kato_slope"] = curve.slope;
  r.outputs["max_excess"] = hb.max_violation;
  r.check("heat_bound_violations", hb.violations, 0.0);
  // Eigenvalue counts against the flat Weyl-form constant, uniformly in the cover degree.
  const std::vector<double> grid{1, 2, 4, 8, 16, 32, 64};
  double worst1 = 0.0, worst2 = 0.0;
  for (int n = 1; n <= std::min(n_max, 32); ++n) {
    const double Ln = L * n;
    worst1 = std::max(worst1, covers::eigencount_check(spectra::twisted_circle_spectrum({Ln, 0.0, 0.0}, 20 * n), Ln, grid, 1));
  }
  for (int n = 1; n <= 4; ++n)
    worst2 = std::max(worst2, covers::eigencount_check(spectra::torus_spectrum(L * n, L, 0.0, 20 * n), L * L * n, grid, 2));
  r.outputs["weyl_ratio_circle"] = worst1;
  r.outputs["weyl_ratio_torus"] = worst2;
  r.check("weyl_circle_excess", std::max(0.0, worst1 - covers::flat_weyl_constant(1)), 0.0);
  r.check("weyl_torus_excess", std::max(0.0, worst2 - covers::flat_weyl_constant(2)), 0.0);
}

// ---- anomaly --------------------------------------------------------------------

anomaly::Field scaling_field(const std::string& name) {
  using anomaly::Field;
  if (name == "bump") return Field::polynomial({{0.2, 0, 0, 1}, {0.15, 1, 0, 0}, {0.1, 1, 1, 0}, {0.25, 0, 0, 2}, {-0.05, 0, 0, 0}});
  if (name == "tilt") return Field::polynomial({{0.3, 1, 0, 0}, {-0.2, 0, 1, 1}, {0.15, 0, 0, 0}});
  if (name == "constant") return Field::constant(0.4);
  if (name == "zero") return Field::zero();
  throw PreconditionError("unknown field '" + name + "' (expected bump, tilt, constant or zero)");
}

void anomaly_smooth_check(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  using anomaly::Field;
  double worst = 0.0;
  for (long k = 0; k < p.integer("trials", 5); ++k) {
    const unsigned s = static_cast<unsigned>(seed + static_cast<std::uint64_t>(k));
    const Field w = Field::random_polynomial(2, 0.3, s);
    const Field s1 = Field::random_polynomial(3, 0.4, 1000 + s);
    const Field s2 = Field::random_polynomial(3, 0.4, 2000 + s);
    const double a21 = anomaly::anomaly_smooth(s1, w).value;
    const double a32 = anomaly::anomaly_smooth(s2, w + s1).value;
    const double a31 = anomaly::anomaly_smooth(s1 + s2, w).value;
    worst = std::max(worst, std::abs(a32 + a21 - a31));
  }
  r.check("cocycle", worst, p.number("tol", 1e-8));
  double worst_c = 0.0;
  for (double c : p.numbers("c", {0.7, -1.3, 2.0}))
    worst_c = std::max(worst_c, std::abs(anomaly::anomaly_smooth(Field::constant(c)).value - c / 3.0));
  r.check("constant_c_over_3", worst_c, p.number("tol", 1e-8));
}

anomaly::ConicalSurfaceData conical_data(const Params& p) {
  const long d = p.integer("d", 2);
  if (d >= 2) return anomaly::pullback_zd(static_cast<int>(d));
  return anomaly::single_cone(anomaly::V3(0.0, 0.0, -1.0), p.number("gamma", 1.0));
}

void anomaly_reference(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto data = conical_data(p);
  auto shifted = data;
  shifted.reference = anomaly::Field::polynomial({{0.3, 1, 0, 0}, {0.2, 0, 1, 1}, {0.1, 0, 0, 1}});
  const auto ladder = anomaly::default_eps_ladder(data);
  const auto ra0 = anomaly::anomaly_renormalized(data, ladder);
  const double ra1 = anomaly::anomaly_renormalized(shifted, ladder).value;
  const double a10 = anomaly::anomaly_smooth(shifted.reference).value;
  r.outputs["RA"] = ra0.value;
  r.outputs["RA_quadrature_error"] = ra0.quadrature_error;
  r.outputs["RA_shifted_reference"] = ra1;
  r.check("reference_independence", std::abs(ra0.value - ra1 - a10), p.number("tol", 1e-4));
}

void anomaly_scaling(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto data = conical_data(p);
  const auto h = scaling_field(p.text("h", "bump"));
  const auto rep = anomaly::conical_scaling_check(data, h, anomaly::default_eps_ladder(data));
  r.outputs["RA_scaled"] = rep.ra_scaled;
  r.outputs["RA_base"] = rep.ra_base;
  r.outputs["regular"] = rep.regular;
  r.outputs["correction"] = rep.correction;
  r.require_true("extrapolation_converged", rep.converged);
  r.check("scaling_residual", std::abs(rep.residual), p.number("tol", 1e-4));
}

void anomaly_counterterm(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto data = conical_data(p);
  const auto fit = anomaly::counterterm_slope(data, anomaly::default_eps_ladder(data));
  r.outputs["slope"] = fit.slope;
  r.outputs["predicted"] = fit.predicted;
  r.check("slope_relative_error", fit.relative_error, p.number("tol", 0.02));
}

void anomaly_weights(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double c = p.number("c", 1.0);
  double worst = 0.0, worst_exp = 0.0;
  for (long d : p.integers("d", {2, 3, 4, 5, 6, 7, 8})) {
    // z^d: one branch point of order d over 0 and one over infinity.
    const auto w = anomaly::branched_weights(static_cast<int>(d), {{static_cast<int>(d)}, {static_cast<int>(d)}}, c);
    const double formula = c / 12.0 * (d - 1.0 / d);
    for (double v : w) worst = std::max(worst, std::abs(v - formula));
    worst_exp = std::max(worst_exp, std::abs(anomaly::renyi_exponent(static_cast<double>(d), c) + 2.0 * formula));
  }
  r.check("branched_weight_formula", worst, 0.0);
  r.check("renyi_exponent", worst_exp, 0.0);
  r.check("exponent_at_d_one", std::abs(anomaly::renyi_exponent(1.0, c)), 0.0);
}

void anomaly_renyi(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double L = p.number("L", 3.0);
  const auto ren = anomaly::renyi_entropy(L, p.number("ell", 1.0), static_cast<int>(p.integer("d", 2)),
                                          p.number("c", 1.0), p.number("C", 1.0));
  r.outputs["trace"] = ren.trace;
  r.outputs["entropy"] = ren.entropy;
  r.outputs["exponent"] = ren.exponent;
  r.check("exponent_formula",
          std::abs(ren.exponent + 2.0 * anomaly::weight_zd(static_cast<int>(p.integer("d", 2)), p.number("c", 1.0))), 0.0);
}

// ---- Gaussian networks ------------------------------------------------------------

std::vector<int> random_subset(int n, int k, std::mt19937_64& rng) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(static_cast<std::size_t>(k));
  return v;
}

void gff_identities(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  using namespace gaussnet;
  const int graphs = static_cast<int>(p.integer("graphs", 100));
  const int max_size = static_cast<int>(p.integer("max_size", 60));
  require(max_size >= 8, "gff-identities: max_size must be at least 8");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double schur = 0, poisson = 0, cncd = 0, mono = 0, markov = 0, compose_q = 0, compose_n = 0;
  for (int t = 0; t < graphs; ++t) {
    const std::uint64_t gs = seed * 1000003u + static_cast<std::uint64_t>(t);
    const int n = 5 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_size - 4));
    const GaussianNetwork g = random_network(n, 3.0 / n, gs, 0.5);
    const auto sigma = random_subset(n, 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n / 2)), rng);
    schur = std::max(schur, dn_schur(g, sigma).duality_residual);
    Eigen::VectorXd f(static_cast<Eigen::Index>(sigma.size()));
    for (auto& v : f) v = nd(rng);
    poisson = std::max(poisson, poisson_extend(g, sigma, f).energy_residual);

    const int half = std::max(2, std::min(3 + t % 25, (max_size - 6) / 2));
    const GaussianNetwork m = random_mirror_network(half, 1 + t % 5, 0.2, gs + 7, 0.5);
    const auto rep = cn_minus_cd_check(m, m.regions.at("plus"), m.regions.at("sigma"), Closure::half_weight);
    cncd = std::max(cncd, rep.residual);
    mono = std::max(mono, -rep.min_eigenvalue);
    const auto mk = markov_bayes_check(m, m.regions.at("sigma"), {m.regions.at("plus").front()});
    markov = std::max(markov, mk.cross_covariance);

    BoundaryNetwork b1, b2;
    b1.net = random_network(6 + t % 25, 0.15, gs + 11, 0.5);
    b2.net = random_network(6 + (t * 7) % 25, 0.15, gs + 13, 0.5);
    const int s = 1 + t % 4;
    for (int i = 0; i < s; ++i) {
      b1.out.push_back(i);
      b2.in.push_back(b2.net.n - 1 - i);
    }
    b1.in = {b1.net.n - 1};
    b2.out = {0};
    const auto cr = amplitude_compose(b2, b1);
    compose_q = std::max(compose_q, cr.quadratic_residual);
    compose_n = std::max(compose_n, cr.normalization_residual);
  }
  r.check("schur_inverse_duality", schur, 1e-12);
  r.check("poisson_energy", poisson, 1e-10);
  r.check("cn_minus_cd", cncd, 1e-12);
  r.check("cn_dominates_cd", std::max(0.0, mono), 1e-12);
  r.check("markov_cross_covariance", markov, 1e-12);
  r.check("amplitude_quadratic", compose_q, 1e-10);
  r.check("amplitude_normalization", compose_n, 1e-10);
}

void gff_wick(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  using namespace gaussnet;
  double law = 0.0;
  for (double rho : {0.5, -0.375, 0.8125}) {
    Eigen::Matrix2d c;
    c << 1.0, rho, rho, 1.0;
    for (int n = 0; n <= 12; ++n)
      for (int m = 0; n + m <= 12; ++m) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        const double want = n == m ? f * std::pow(rho, n) : 0.0;
        law = std::max(law, std::abs(wick_product_expectation(c, {n, m}, true) - want));
      }
  }
  r.check("pairing_law_exact", law, 0.0);
  const long samples = p.integer("samples", 1000000);
  const double rho = p.number("rho", 0.6);
  Eigen::Matrix2d c;
  c << 1.0, rho, rho, 1.0;
  const auto mc = wick_monte_carlo(c, {3, 3}, true, samples, seed);
  r.outputs["mc_33"] = mc.mean;
  r.outputs["mc_33_stderr"] = mc.stderr_;
  r.check("monte_carlo_33", std::abs(mc.mean - 6.0 * rho * rho * rho), 3.0 * mc.stderr_);
  const GaussianNetwork g = random_network(10, 0.3, seed + 17, 1.0);
  const double gq = p.number("g", 0.1);
  const auto st = wick_interaction(g, {0, 0, gq}, samples, seed + 1);
  const double exact = quadratic_perturbation_exact(g, gq);
  r.outputs["boltzmann_mc"] = st.boltzmann.mean;
  r.outputs["boltzmann_exact"] = exact;
  r.check("fredholm_quadratic", std::abs(st.boltzmann.mean - exact), 3.0 * st.boltzmann.stderr_);
}

// ---- reflection-positivity witnesses ------------------------------------------------

json certificate_json(const rpwitness::WitnessCertificate& c) {
  return {{"construction", rpwitness::to_string(c.construction)},
          {"parameters", c.parameters},
          {"coefficients", c.coefficients},
          {"pairing_value", c.pairing_value},
          {"tolerance", c.tolerance},
          {"negative", c.negative},
          {"uncut_value", c.uncut_value},
          {"trend", c.trend},
          {"flagged", c.flagged},
          {"note", c.note}};
}

void record_certificate(const rpwitness::WitnessCertificate& c, ExperimentReport& r) {
  r.outputs["pairing"] = c.pairing_value;
  r.outputs["tolerance"] = c.tolerance;
  r.outputs["uncut"] = c.uncut_value;
  r.require_true("certified_negative", c.negative);
  r.check("reevaluation", std::abs(rpwitness::reevaluate(c) - c.pairing_value), 1e-10);
  r.check("uncut_negativity", std::max(0.0, -c.uncut_value), 1e-12);
  r.details["certificate"] = certificate_json(c);
}

void rp_line(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto c = rpwitness::line_witness(p.number("kappa", 1.0), static_cast<int>(p.integer("n_max", 40)));
  r.outputs["n"] = c.parameters.at("n");
  record_certificate(c, r);
}

void rp_cylinder(const Params& p, std::uint64_t, ExperimentReport& r) {
  const auto c = rpwitness::cylinder_witness(p.number("Lambda", 1.0), p.number("L", 2 * kPi),
                                             static_cast<int>(p.integer("n", -1)), static_cast<int>(p.integer("n_max", 40)));
  r.outputs["n"] = c.parameters.at("n");
  record_certificate(c, r);
}

void rp_compact(const Params& p, std::uint64_t, ExperimentReport& r) {
  rpwitness::CompactOptions o;
  o.margin = p.number("margin", o.margin);
  const double Lambda = p.number("Lambda", 4.0);
  const auto c = rpwitness::compact_witness(Lambda, o);
  const double ls = rpwitness::largest_odd_eigenvalue(Lambda);
  r.outputs["lambda_star"] = ls;
  r.check("closed_form", std::abs(c.pairing_value + 1.0 / (ls + 1.0)), p.number("tol", 1e-8));
  record_certificate(c, r);
}

void rp_ball(const Params& p, std::uint64_t, ExperimentReport& r) {
  const double Lambda = p.number("Lambda", 4.0);
  const auto c = rpwitness::fourier_ball_witness(Lambda, static_cast<int>(p.integer("basis", 8)));
  r.outputs["target"] = rpwitness::ball_target(Lambda);
  r.outputs["relative_gap"] = c.parameters.at("relative_gap");
  r.outputs["flagged"] = c.flagged;
  r.check("target_relative_gap", c.parameters.at("relative_gap"), p.number("tol", 0.1));
  record_certificate(c, r);
}

void rp_phi4(const Params& p, std::uint64_t seed, ExperimentReport& r) {
  const auto c = rpwitness::compact_witness(p.number("Lambda", 4.0));
  for (double g : p.numbers("coupling", {1e-4, 1e-3})) {
    const auto res = rpwitness::phi4_reweighted_pairing(c, g, static_cast<std::size_t>(p.integer("samples", 1000000)),
                                                         seed, static_cast<int>(p.integer("lattice", 64)));
    char key[64];
    std::snprintf(key, sizeof key, "c=%g", g);
    r.outputs[std::string("mean ") + key] = res.mean;
    r.outputs[std::string("stderr ") + key] = res.stderr_;
    if (g <= 1e-3) r.check(std::string("gaussian_limit ") + key, std::abs(res.mean - res.gaussian_value), 3.0 * res.stderr_);
  }
  r.outputs["gaussian"] = c.pairing_value;
}

std::vector<Experiment> build_registry() {
  return {
      {"spectra-circle", "spectra", "twisted circle eigenvalues against direct enumeration", {"L", "m", "theta", "n_max"}, spectra_circle},
      {"spectra-cover", "spectra", "cover graph spectrum equals the union of twisted blocks",
       {"base", "n", "p", "graph_seed", "N", "tol"}, spectra_cover},
      {"zeta-circle", "zeta", "zeta-regularized circle determinant against its closed form", {"L", "m", "theta", "n_max", "tol"}, zeta_circle},
      {"zeta-cover-product", "zeta", "cover determinant equals the product of twisted determinants", {"L", "m", "N", "n_max", "tol"},
       zeta_cover_product},
      {"zeta-bfk", "zeta", "gluing formula for log det on the flat torus", {"L1", "L2", "m", "cutoff", "tol"}, zeta_bfk},
      {"transfer-gaussian", "transfer", "Nystrom transfer matrix against the circulant Gaussian integral",
       {"m", "N", "grid", "tol", "free_energy_tol"}, transfer_gaussian},
      {"transfer-mixing", "transfer", "Perron-Frobenius positivity and the mixing inequality", {"P", "grid", "pairs", "k_max", "tol"},
       transfer_mixing},
      {"transfer-mcmc", "transfer", "transfer free energy against seeded MCMC", {"P", "N", "steps", "nodes", "sigmas"}, transfer_mcmc},
      {"covers-heat-trace", "covers", "eigenvalue-sum and deck-sum heat traces", {"L", "N", "t", "tol"}, covers_heat_trace},
      {"covers-free-energy", "covers", "free energy per volume along a cover tower",
       {"geometry", "L", "L2", "m", "N", "base", "n", "p", "graph_seed", "pair_tol", "tol"}, covers_free_energy},
      {"covers-heat-bound", "covers", "small-eigenvalue heat bound and Weyl-form counts", {"L", "N_max"}, covers_heat_bound},
      {"anomaly-smooth", "anomaly", "smooth anomaly cocycle and constant conformal factor", {"trials", "c", "tol"}, anomaly_smooth_check},
      {"anomaly-reference", "anomaly", "renormalized anomaly is independent of the reference metric", {"d", "gamma", "tol"},
       anomaly_reference},
      {"anomaly-scaling", "anomaly", "conical scaling identity", {"d", "gamma", "h", "tol"}, anomaly_scaling},
      {"anomaly-counterterm", "anomaly", "log-epsilon counterterm slope", {"d", "gamma", "tol"}, anomaly_counterterm},
      {"weights", "anomaly", "branched-cover weights and Renyi exponents", {"d", "c"}, anomaly_weights},
      {"renyi", "anomaly", "Renyi entropy of an interval", {"L", "ell", "d", "c", "C"}, anomaly_renyi},
      {"gff-identities", "gff", "Gaussian network identities on random graphs", {"graphs", "max_size"}, gff_identities},
      {"gff-wick", "gff", "Wick calculus: enumeration, Monte Carlo and the quadratic Fredholm formula", {"samples", "rho", "g"},
       gff_wick},
      {"rp-line", "rp", "one-dimensional witness", {"kappa", "n_max"}, rp_line},
      {"rp-cylinder", "rp", "cylinder witness", {"Lambda", "L", "n", "n_max"}, rp_cylinder},
      {"rp-compact", "rp", "compact circle dual-basis witness", {"Lambda", "margin", "tol"}, rp_compact},
      {"rp-ball", "rp", "flat-space Fourier-ball witness", {"Lambda", "basis", "tol"}, rp_ball},
      {"rp-phi4", "rp", "small-coupling reweighting of the compact witness", {"Lambda", "coupling", "samples", "lattice"}, rp_phi4},
  };
}

}  // namespace

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> registry = build_registry();
  return registry;
}

const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : experiments())
    if (e.id == id) return e;
  throw PreconditionError("unknown experiment '" + id + "'");
}

ExperimentReport run_experiment(const std::string& id, const Params& params, std::uint64_t seed) {
  const Experiment& e = find_experiment(id);
  for (const auto& [k, v] : params.values())
    require(e.keys.count(k) > 0, "experiment " + id + " does not take parameter '" + k + "'");
  ExperimentReport r;
  r.id = id;
  r.inputs = params.echo();
  r.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e.body(params, seed, r);
  } catch (const PreconditionError& ex) {
    r.error_kind = "precondition";
    r.error = ex.what();
  } catch (const NumericalError& ex) {
    r.error_kind = "numerical";
    r.error = ex.what();
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.finalize();
  return r;
}

std::vector<ExperimentReport> run_config(const Config& cfg, std::optional<std::uint64_t> seed_override) {
  const Params globals(cfg.globals);
  for (const auto& [k, v] : cfg.globals)
    require(k == "seed" || k == "threads", "unknown global config key '" + k + "'");
  const std::uint64_t seed = seed_override ? *seed_override : static_cast<std::uint64_t>(globals.integer("seed", 2024));
  if (globals.has("threads")) par::set_threads(static_cast<int>(globals.integer("threads", 0)));
  // Validate every section before running any of them.
  for (const auto& s : cfg.sections) {
    const auto& e = find_experiment(s.name);
    for (const auto& [k, v] : s.values)
      require(e.keys.count(k) > 0, "config line " + std::to_string(s.line) + ": experiment " + s.name +
                                       " does not take parameter '" + k + "'");
  }
  std::vector<ExperimentReport> out;
  for (const auto& s : cfg.sections) out.push_back(run_experiment(s.name, Params(s.values), seed));
  return out;
}

}  // namespace speclab::report
