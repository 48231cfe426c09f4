#include <cmath>
#include <random>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/transfer.hpp"

namespace speclab::transfer {

McmcResult mcmc_chain(const EvenPoly& P, int N, long steps, std::uint64_t seed, double width, long burn_in_sweeps) {
  require(steps >= 100000, "mcmc_chain: steps must be at least 1e5");
  require(N >= 2, "mcmc_chain: N must be at least 2");
  require(width > 0.0, "mcmc_chain: proposal width must be positive");
  require(P.admissible(), "mcmc_chain: P must confine (positive leading coefficient, degree >= 2)");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> s(N, 0.0);
  McmcResult r;
  r.N = N;
  r.sweeps = steps / N;
  r.samples.reserve(static_cast<std::size_t>(r.sweeps) * N);
  long accepted = 0;

  auto sweep = [&](bool count) {
    for (int i = 0; i < N; ++i) {
      const double left = s[(i + N - 1) % N];
      const double right = s[(i + 1) % N];
      const double old = s[i];
      const double prop = old + width * (2.0 * unif(rng) - 1.0);
      const double d_old = (old - left) * (old - left) + (right - old) * (right - old) + P(old);
      const double d_new = (prop - left) * (prop - left) + (right - prop) * (right - prop) + P(prop);
      const double u = unif(rng);
      if (d_new <= d_old || u < std::exp(d_old - d_new)) {
        s[i] = prop;
        if (count) ++accepted;
      }
    }
  };

  for (long b = 0; b < burn_in_sweeps; ++b) sweep(false);
  for (long k = 0; k < r.sweeps; ++k) {
    sweep(true);
    r.samples.insert(r.samples.end(), s.begin(), s.end());
  }
  r.acceptance_rate = static_cast<double>(accepted) / (static_cast<double>(r.sweeps) * N);
  return r;
}

MeanError batch_means(const std::vector<double>& series, int batches) {
  require(batches >= 2, "batch_means: need at least 2 batches");
  require(series.size() >= static_cast<std::size_t>(batches), "batch_means: series shorter than batch count");
  const std::size_t len = series.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) acc += series[b * len + i];
    means[b] = acc / len;
  }
  MeanError out;
  for (double m : means) out.mean += m;
  out.mean /= batches;
  double var = 0.0;
  for (double m : means) var += (m - out.mean) * (m - out.mean);
  var /= (batches - 1);
  out.stderr_ = std::sqrt(var / batches);
  return out;
}

McmcFreeEnergy mcmc_free_energy(const EvenPoly& P, int N, long steps_per_chain, std::uint64_t seed, int nodes,
                                bool parallel) {
  require(P.admissible(), "mcmc_free_energy: P must confine");
  require(nodes >= 2, "mcmc_free_energy: need at least 2 quadrature nodes");
  const EvenPoly p0{{0.0, 1.0}};
  const auto rule = numerics::gauss_legendre(nodes, 0.0, 1.0);

  // d/dlambda log Z = -E_lambda[sum_i (P - P0)(s_i)].
  std::vector<double> means(nodes), errors(nodes), accept(nodes);
  auto run = [&](std::size_t k) {
    const double lam = rule.nodes[k];
    EvenPoly pl;
    const std::size_t deg = std::max(P.c.size(), p0.c.size());
    pl.c.assign(deg, 0.0);
    for (std::size_t j = 0; j < deg; ++j) {
      const double a = j < p0.c.size() ? p0.c[j] : 0.0;
      const double b = j < P.c.size() ? P.c[j] : 0.0;
      pl.c[j] = a + lam * (b - a);
    }
    const McmcResult chain = mcmc_chain(pl, N, steps_per_chain, seed + 0x9E3779B97F4A7C15ULL * (k + 1));
    std::vector<double> series(chain.sweeps);
    for (long t = 0; t < chain.sweeps; ++t) {
      double acc = 0.0;
      for (int i = 0; i < N; ++i) {
        const double x = chain.samples[t * N + i];
        acc += P(x) - p0(x);
      }
      series[t] = acc;
    }
    const MeanError me = batch_means(series);
    means[k] = me.mean;
    errors[k] = me.stderr_;
    accept[k] = chain.acceptance_rate;
  };
  if (parallel)
    par::for_each(rule.size(), run);
  else
    for (std::size_t k = 0; k < rule.size(); ++k) run(k);

  McmcFreeEnergy out;
  out.lambda_nodes = rule.nodes;
  out.means = means;
  out.errors = errors;
  double integral = 0.0, var = 0.0, acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    integral += rule.weights[k] * means[k];
    var += rule.weights[k] * rule.weights[k] * errors[k] * errors[k];
    acc += accept[k];
  }
  out.value = (gaussian_chain_log_z(N, 1.0) - integral) / N;
  out.standard_error = std::sqrt(var) / N;
  out.mean_acceptance = acc / nodes;
  return out;
}

}  // namespace speclab::transfer
