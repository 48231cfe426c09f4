#include <cmath>
#include <numbers>
#include <random>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/rpwitness.hpp"

namespace speclab::rpwitness {

namespace {

constexpr std::size_t kSamplesPerBlock = 4096;

std::mt19937_64 block_rng(std::uint64_t seed, std::size_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

// Running sums for the ratio estimator E[XG]/E[G].
struct Sums {
  double g = 0.0, xg = 0.0, gg = 0.0, xgxg = 0.0, xgg = 0.0;
  Sums& operator+=(const Sums& o) {
    g += o.g;
    xg += o.xg;
    gg += o.gg;
    xgxg += o.xgxg;
    xgg += o.xgg;
    return *this;
  }
};

}  // namespace

ReweightResult phi4_reweighted_pairing(const WitnessCertificate& compact, double coupling, std::size_t samples,
                                       std::uint64_t seed, int lattice, bool parallel) {
  require(compact.construction == Construction::compact_dual, "phi4 reweighting needs a compact certificate");
  require(coupling >= 0.0, "phi4 reweighting: coupling must be nonnegative");
  require(samples >= 2, "phi4 reweighting: need at least two samples");
  require(lattice >= 4, "phi4 reweighting: lattice needs at least 4 points");

  const double Lambda = compact.parameters.at("Lambda");
  const int K = static_cast<int>(std::floor(std::sqrt(Lambda) + 1e-12));
  const auto m = compact_moments(compact.coefficients, compact.parameters.at("margin"), K);
  const std::size_t modes = m.size();

  std::vector<double> sd(modes), parity(modes);
  std::vector<double> table(modes * static_cast<std::size_t>(lattice));
  for (std::size_t i = 0; i < modes; ++i) {
    const int k = static_cast<int>((i + 1) / 2);
    sd[i] = 1.0 / std::sqrt(k * k + 1.0);
    parity[i] = (i == 0 || i % 2 == 1) ? 1.0 : -1.0;
    for (int l = 0; l < lattice; ++l) {
      const double th = 2.0 * std::numbers::pi * l / lattice;
      double e;
      if (i == 0) e = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      else e = (i % 2 ? std::cos(k * th) : std::sin(k * th)) / std::sqrt(std::numbers::pi);
      table[i * static_cast<std::size_t>(lattice) + static_cast<std::size_t>(l)] = e;
    }
  }
  const double cell = 2.0 * std::numbers::pi / lattice;

  const std::size_t nblocks = (samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  std::vector<Sums> partial(nblocks);
  auto run_block = [&](std::size_t b) {
    auto rng = block_rng(seed, b);
    std::normal_distribution<double> normal;
    const std::size_t lo = b * kSamplesPerBlock;
    const std::size_t hi = std::min(samples, lo + kSamplesPerBlock);
    std::vector<double> xi(modes), field(static_cast<std::size_t>(lattice));
    Sums s;
    for (std::size_t n = lo; n < hi; ++n) {
      double pf = 0.0, ptf = 0.0;
      for (std::size_t i = 0; i < modes; ++i) {
        xi[i] = sd[i] * normal(rng);
        pf += xi[i] * m[i];
        ptf += parity[i] * xi[i] * m[i];
      }
      double action = 0.0;
      for (int l = 0; l < lattice; ++l) {
        double v = 0.0;
        for (std::size_t i = 0; i < modes; ++i) v += xi[i] * table[i * static_cast<std::size_t>(lattice) + static_cast<std::size_t>(l)];
        action += v * v * v * v;
      }
      const double x = pf * ptf;
      const double g = std::exp(-coupling * cell * action);
      s.g += g;
      s.xg += x * g;
      s.gg += g * g;
      s.xgxg += x * g * x * g;
      s.xgg += x * g * g;
    }
    partial[b] = s;
  };
  if (parallel) par::for_each(nblocks, run_block);
  else
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  Sums t;
  for (const auto& p : partial) t += p;

  const double N = static_cast<double>(samples);
  const double mg = t.g / N, mxg = t.xg / N;
  const double r = mxg / mg;
  // Delta method for a ratio of means: Var(XG - r G) / (N E[G]^2).
  const double var = (t.xgxg - 2.0 * r * t.xgg + r * r * t.gg) / N - (mxg - r * mg) * (mxg - r * mg);
  ReweightResult out;
  out.coupling = coupling;
  out.mean = r;
  out.stderr_ = std::sqrt(std::max(var, 0.0) * N / (N - 1.0) / N) / mg;
  out.gaussian_value = reevaluate(compact);
  out.samples = samples;
  return out;
}

}  // namespace speclab::rpwitness
