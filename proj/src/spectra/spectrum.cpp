#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "speclab/error.hpp"
#include "speclab/spectra.hpp"

namespace speclab {

void Spectrum::normalize() {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  kernel_dim = static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                              [](double x) { return std::abs(x) < kKernelTol; }));
  if (!tail) {
    truncation.n_max = static_cast<long>(eigenvalues.size());
    truncation.complete_below = std::numeric_limits<double>::infinity();
    if (truncation.description.empty()) truncation.description = "finite";
  }
}

std::vector<std::pair<double, int>> Spectrum::grouped(double tol) const {
  std::vector<std::pair<double, int>> out;
  for (double x : eigenvalues) {
    if (!out.empty() && std::abs(x - out.back().first) <= tol * std::max(1.0, std::abs(x)))
      ++out.back().second;
    else
      out.emplace_back(x, 1);
  }
  return out;
}

double Spectrum::smallest_positive() const {
  for (double x : eigenvalues)
    if (x >= kKernelTol) return x;
  return std::numeric_limits<double>::infinity();
}

double sorted_linf_distance(std::vector<double> a, std::vector<double> b) {
  require(a.size() == b.size(), "sorted_linf_distance: multisets differ in size");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace spectra {

std::string to_csv(const Spectrum& sp) {
  std::ostringstream os;
  os.precision(17);
  os << "index,eigenvalue,multiplicity\n";
  int idx = 0;
  for (const auto& [value, mult] : sp.grouped()) os << idx++ << ',' << value << ',' << mult << '\n';
  return os.str();
}

nlohmann::json to_json(const Spectrum& sp) {
  nlohmann::json j;
  j["eigenvalues"] = sp.eigenvalues;
  j["kernel_dim"] = sp.kernel_dim;
  j["truncation"] = {{"n_max", sp.truncation.n_max},
                     {"complete_below", std::isfinite(sp.truncation.complete_below)
                                            ? nlohmann::json(sp.truncation.complete_below)
                                            : nlohmann::json("inf")},
                     {"description", sp.truncation.description}};
  if (sp.tail) {
    nlohmann::json heat = nlohmann::json::array();
    for (const auto& h : sp.tail->heat) heat.push_back({{"c", h.c}, {"alpha", h.alpha}, {"mu", h.mu}});
    j["tail"] = {{"heat", heat}, {"ell", sp.tail->ell}};
  }
  return j;
}

}  // namespace spectra
}  // namespace speclab
