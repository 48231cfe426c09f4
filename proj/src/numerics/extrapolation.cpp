#include <cmath>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"

namespace speclab::numerics {

namespace {

void check_samples(const std::vector<std::pair<double, double>>& samples) {
  require(samples.size() >= 3, "extrapolation: need at least 3 samples");
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    require(samples[i + 1].first < samples[i].first, "extrapolation: h must be strictly decreasing");
  require(samples.back().first > 0.0, "extrapolation: h must be positive");
}

void finish(ExtrapolationResult& r) {
  const auto& st = r.stage_values;
  r.value = st.back();
  r.error_estimate = st.size() >= 2 ? std::abs(st.back() - st[st.size() - 2]) : INFINITY;
  // Converged when the stage-to-stage corrections shrink monotonically.
  r.converged = std::isfinite(r.value);
  for (std::size_t k = 2; k < st.size(); ++k) {
    const double prev = std::abs(st[k - 1] - st[k - 2]);
    const double cur = std::abs(st[k] - st[k - 1]);
    if (cur > prev && cur > 1e-14 * (1.0 + std::abs(st[k]))) r.converged = false;
  }
}

}  // namespace

ExtrapolationResult richardson(const std::vector<std::pair<double, double>>& samples, int order) {
  check_samples(samples);
  require(order >= 1, "richardson: order must be positive");
  const std::size_t n = samples.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = samples[i].second;
  ExtrapolationResult r;
  r.stage_values.push_back(t[n - 1]);
  for (std::size_t k = 1; k < n; ++k) {
    const int p = order + static_cast<int>(k) - 1;
    r.orders_used.push_back(p);
    for (std::size_t i = n - 1; i >= k; --i) {
      const double ratio = std::pow(samples[i - k].first / samples[i].first, p);
      t[i] = t[i] + (t[i] - t[i - 1]) / (ratio - 1.0);
      if (i == k) break;
    }
    r.stage_values.push_back(t[n - 1]);
  }
  finish(r);
  return r;
}

ExtrapolationResult extrapolate_model(const std::vector<std::pair<double, double>>& samples,
                                      const std::vector<std::function<double(double)>>& basis) {
  check_samples(samples);
  require(!basis.empty(), "extrapolate_model: empty basis");
  const std::size_t n = samples.size();
  const std::size_t kmax = std::min(basis.size(), n - 1);
  ExtrapolationResult r;
  r.stage_values.push_back(samples.back().second);
  for (std::size_t k = 1; k <= kmax; ++k) {
    // Fit v0 + sum_{j<k} c_j b_j on the k + 1 smallest-h samples.
    const std::size_t m = k + 1;
    Eigen::MatrixXd a(m, k + 1);
    Eigen::VectorXd y(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& [h, v] = samples[n - m + i];
      a(i, 0) = 1.0;
      for (std::size_t j = 0; j < k; ++j) a(i, j + 1) = basis[j](h);
      y(i) = v;
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    r.stage_values.push_back(c(0));
    r.orders_used.push_back(static_cast<int>(k));
  }
  finish(r);
  return r;
}

}  // namespace speclab::numerics
