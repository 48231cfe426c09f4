#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "speclab/error.hpp"
#include "speclab/gaussnet.hpp"
#include "speclab/parallel.hpp"

namespace speclab::gaussnet {

namespace {

constexpr int kMaxDegree = 12;
constexpr long kBlock = 4096;

int pair_index(int a, int b, int k) {
  if (a > b) std::swap(a, b);
  // Row-major position of (a, b) in the upper triangle of a k x k matrix.
  return a * k - a * (a - 1) / 2 + (b - a);
}

void check_powers(int k, const std::vector<int>& powers) {
  require(static_cast<int>(powers.size()) == k, "wick: one power per variable");
  int total = 0;
  for (int p : powers) {
    require(p >= 0, "wick: powers must be nonnegative");
    total += p;
  }
  require(total <= kMaxDegree, "wick: total degree above the enumeration bound of 12");
}

std::mt19937_64 block_rng(std::uint64_t seed, long block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

struct Partial {
  double sum = 0.0, sumsq = 0.0, wsum = 0.0, wsumsq = 0.0;
  double min = INFINITY;
  bool finite = true;
};

// Runs body(rng, count, partial) over fixed-size blocks, in parallel or not;
// results do not depend on the thread count.
std::vector<Partial> run_blocks(long n_samples, std::uint64_t seed, bool parallel,
                                const std::function<void(std::mt19937_64&, long, Partial&)>& body) {
  const long nblocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<Partial> parts(nblocks);
  auto work = [&](std::size_t b) {
    std::mt19937_64 rng = block_rng(seed, static_cast<long>(b));
    const long count = std::min(kBlock, n_samples - static_cast<long>(b) * kBlock);
    body(rng, count, parts[b]);
  };
  if (parallel)
    par::for_each(static_cast<std::size_t>(nblocks), work);
  else
    for (long b = 0; b < nblocks; ++b) work(static_cast<std::size_t>(b));
  return parts;
}

MonteCarlo summarize(double sum, double sumsq, long n) {
  MonteCarlo mc;
  mc.samples = n;
  mc.mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mc.mean * mc.mean) / (n - 1));
  mc.stderr_ = std::sqrt(var / n);
  return mc;
}

}  // namespace

std::map<std::vector<int>, long> wick_pairing_counts(int k, const std::vector<int>& powers, bool wick_ordered) {
  check_powers(k, powers);
  std::vector<int> legs;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < powers[i]; ++j) legs.push_back(i);
  std::map<std::vector<int>, long> counts;
  if (legs.size() % 2) return counts;
  const int npairs = k * (k + 1) / 2;
  std::vector<int> key(npairs, 0);
  std::vector<bool> used(legs.size(), false);
  std::function<void()> rec = [&]() {
    std::size_t first = 0;
    while (first < legs.size() && used[first]) ++first;
    if (first == legs.size()) {
      ++counts[key];
      return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < legs.size(); ++j) {
      if (used[j]) continue;
      // Wick ordering removes contractions inside one factor.
      if (wick_ordered && legs[j] == legs[first]) continue;
      used[j] = true;
      ++key[pair_index(legs[first], legs[j], k)];
      rec();
      --key[pair_index(legs[first], legs[j], k)];
      used[j] = false;
    }
    used[first] = false;
  };
  rec();
  return counts;
}

double wick_product_expectation(const Eigen::MatrixXd& cov, const std::vector<int>& powers, bool wick_ordered) {
  const int k = static_cast<int>(cov.rows());
  require(cov.cols() == k, "wick_product_expectation: covariance must be square");
  const auto counts = wick_pairing_counts(k, powers, wick_ordered);
  std::vector<double> entry(k * (k + 1) / 2);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) entry[pair_index(a, b, k)] = cov(a, b);
  double total = 0.0;
  for (const auto& [key, count] : counts) {
    double term = static_cast<double>(count);
    for (std::size_t i = 0; i < key.size(); ++i)
      for (int e = 0; e < key[i]; ++e) term *= entry[i];
    total += term;
  }
  return total;
}

double wick_power(double x, int n, double c) {
  require(n >= 0, "wick_power: n must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < n; ++j) {
    const double next = x * cur - j * c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double wick_expectation_hermite(const Eigen::MatrixXd& cov, const std::vector<int>& powers) {
  const int k = static_cast<int>(cov.rows());
  check_powers(k, powers);
  // Expand prod_i :X_i^{n_i}: into ordinary monomials.
  std::vector<std::pair<double, std::vector<int>>> terms{{1.0, std::vector<int>(k, 0)}};
  for (int i = 0; i < k; ++i) {
    const int n = powers[i];
    std::vector<std::pair<double, std::vector<int>>> next;
    double coef = 1.0;  // (-1)^j n! / (j! (n-2j)! 2^j) c^j, updated in j
    for (int j = 0; 2 * j <= n; ++j) {
      if (j > 0) coef *= -static_cast<double>((n - 2 * j + 2) * (n - 2 * j + 1)) / (2.0 * j) * cov(i, i);
      for (const auto& [c, p] : terms) {
        std::vector<int> q = p;
        q[i] = n - 2 * j;
        next.push_back({c * coef, q});
      }
    }
    terms = std::move(next);
  }
  double total = 0.0;
  for (const auto& [c, p] : terms) total += c * wick_product_expectation(cov, p, false);
  return total;
}

MonteCarlo wick_monte_carlo(const Eigen::MatrixXd& cov, const std::vector<int>& powers, bool wick_ordered,
                            long n_samples, std::uint64_t seed, bool parallel) {
  const int k = static_cast<int>(cov.rows());
  check_powers(k, powers);
  require(n_samples >= 2, "wick_monte_carlo: need at least 2 samples");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  require(llt.info() == Eigen::Success, "wick_monte_carlo: covariance must be positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const auto parts = run_blocks(n_samples, seed, parallel, [&](std::mt19937_64& rng, long count, Partial& out) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(k);
    for (long s = 0; s < count; ++s) {
      for (int i = 0; i < k; ++i) z(i) = normal(rng);
      const Eigen::VectorXd x = l * z;
      double v = 1.0;
      for (int i = 0; i < k; ++i) v *= wick_ordered ? wick_power(x(i), powers[i], cov(i, i)) : std::pow(x(i), powers[i]);
      out.sum += v;
      out.sumsq += v * v;
    }
  });
  double sum = 0.0, sumsq = 0.0;
  for (const auto& p : parts) {
    sum += p.sum;
    sumsq += p.sumsq;
  }
  return summarize(sum, sumsq, n_samples);
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& Q, long n_samples, std::uint64_t seed) {
  require(n_samples >= 1, "sample_gaussian: need at least one sample");
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  require(llt.info() == Eigen::Success, "sample_gaussian: Q must be positive definite");
  const int n = static_cast<int>(Q.rows());
  // Q = L L^T, so L^{-T} z has covariance Q^{-1}.
  const Eigen::MatrixXd lt = llt.matrixU();
  Eigen::MatrixXd out(n_samples, n);
  const long nblocks = (n_samples + kBlock - 1) / kBlock;
  par::for_each(static_cast<std::size_t>(nblocks), [&](std::size_t b) {
    std::mt19937_64 rng = block_rng(seed, static_cast<long>(b));
    std::normal_distribution<double> normal;
    const long lo = static_cast<long>(b) * kBlock;
    const long hi = std::min(n_samples, lo + kBlock);
    Eigen::VectorXd z(n);
    for (long s = lo; s < hi; ++s) {
      for (int i = 0; i < n; ++i) z(i) = normal(rng);
      out.row(s) = lt.triangularView<Eigen::Upper>().solve(z).transpose();
    }
  });
  return out;
}

InteractionStats wick_interaction(const GaussianNetwork& net, const std::vector<double>& wick_coeffs, long n_samples,
                                  std::uint64_t seed, bool parallel) {
  require(!wick_coeffs.empty(), "wick_interaction: empty polynomial");
  require(n_samples >= 2, "wick_interaction: need at least 2 samples");
  const Eigen::MatrixXd c = net.covariance();
  const Eigen::VectorXd var = c.diagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(net.Q);
  const Eigen::MatrixXd lt = llt.matrixU();
  const int n = net.n;
  const auto parts = run_blocks(n_samples, seed, parallel, [&](std::mt19937_64& rng, long count, Partial& out) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (long s = 0; s < count; ++s) {
      for (int i = 0; i < n; ++i) z(i) = normal(rng);
      const Eigen::VectorXd phi = lt.triangularView<Eigen::Upper>().solve(z);
      double action = 0.0;
      for (int x = 0; x < n; ++x)
        for (std::size_t k = 0; k < wick_coeffs.size(); ++k)
          if (wick_coeffs[k] != 0.0) action += wick_coeffs[k] * wick_power(phi(x), static_cast<int>(k), var(x));
      const double w = std::exp(-action);
      out.sum += action;
      out.sumsq += action * action;
      out.wsum += w;
      out.wsumsq += w * w;
      out.min = std::min(out.min, action);
      if (!std::isfinite(action) || !std::isfinite(w)) out.finite = false;
    }
  });
  Partial t;
  for (const auto& p : parts) {
    t.sum += p.sum;
    t.sumsq += p.sumsq;
    t.wsum += p.wsum;
    t.wsumsq += p.wsumsq;
    t.min = std::min(t.min, p.min);
    t.finite = t.finite && p.finite;
  }
  InteractionStats st;
  st.action = summarize(t.sum, t.sumsq, n_samples);
  st.boltzmann = summarize(t.wsum, t.wsumsq, n_samples);
  st.min_action = t.min;
  st.effective_fraction = t.wsum * t.wsum / (static_cast<double>(n_samples) * t.wsumsq);
  if (!t.finite) {
    st.flagged = true;
    st.note = "non-finite action or weight sampled";
  } else if (st.effective_fraction < 1e-3) {
    st.flagged = true;
    st.note = "exp(-S) dominated by a handful of samples; its mean is not reliable";
  }
  return st;
}

double quadratic_perturbation_exact(const GaussianNetwork& net, double g) {
  const Eigen::MatrixXd v = 2.0 * g * net.covariance();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(net.n, net.n) + v;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, "quadratic_perturbation_exact: 1 + V is not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < net.n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return std::exp(0.5 * v.trace() - 0.5 * logdet);
}

}  // namespace speclab::gaussnet
