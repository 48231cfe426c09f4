#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace speclab {

// One term c * t^alpha * exp(-mu t) of a small-time heat-trace expansion.
struct HeatTerm {
  double c = 0.0;
  double alpha = 0.0;
  double mu = 0.0;
};

// The eigenvalue family c^2 (n + a)^2 + m2 for n = 0, 1, 2, ...
// repeated `multiplicity` times. Requires a > 0.
struct ArithmeticBranch {
  double c = 1.0;
  double a = 1.0;
  double m2 = 0.0;
  int multiplicity = 1;
};

// What is known about the infinite spectrum beyond the stored eigenvalues.
//
// `heat` is the small-t expansion of the full heat trace (kernel included),
// accurate up to a remainder of order exp(-ell^2 / 4t). When `branches` is
// non-empty, branches plus `isolated` enumerate the whole spectrum exactly.
struct TailLaw {
  std::vector<HeatTerm> heat;
  double ell = 0.0;
  std::vector<ArithmeticBranch> branches;
  std::vector<double> isolated;
};

struct Truncation {
  long n_max = 0;
  // Every eigenvalue below this bound is present in the stored list.
  double complete_below = 0.0;
  std::string description;
};

// Ascending eigenvalue multiset. A spectrum without a tail law is finite and
// the list is all of it.
struct Spectrum {
  std::vector<double> eigenvalues;
  int kernel_dim = 0;
  Truncation truncation;
  std::optional<TailLaw> tail;

  static constexpr double kKernelTol = 1e-12;

  bool is_finite() const { return !tail.has_value(); }
  // Sorts, counts the kernel, and marks a finite spectrum as complete.
  void normalize();
  // Distinct values with multiplicities, merging values closer than tol.
  std::vector<std::pair<double, int>> grouped(double tol = 1e-9) const;
  double smallest_positive() const;
};

// Sorted-list sup distance between two multisets of equal size.
double sorted_linf_distance(std::vector<double> a, std::vector<double> b);

}  // namespace speclab
