#include "speclab/error.hpp"
#include "speclab/numerics.hpp"

namespace speclab::numerics {

double hermite_poly(int n, double x) {
  require(n >= 0, "hermite_poly: n must be nonnegative");
  if (n == 0) return 1.0;
  double h0 = 1.0, h1 = x;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace speclab::numerics
