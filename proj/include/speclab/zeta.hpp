#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "speclab/spectrum.hpp"

namespace speclab::zeta {

using cplx = std::complex<double>;

enum class Method { direct_sum, mellin_split, closed_form };
std::string to_string(Method m);

struct ZetaEvaluation {
  cplx s;
  cplx value;
  Method method = Method::direct_sum;
  double error_estimate = 0.0;
};

// Heat-trace data for the Mellin route. `trace` is the full heat trace
// (kernel included) and must be accurate for t >= t_valid. `heat` is its
// small-t expansion with remainder O(exp(-ell^2/4t)).
struct HeatModel {
  std::function<double(double)> trace;
  std::vector<HeatTerm> heat;
  double ell = 0.0;
  int kernel_dim = 0;
  double gap = 0.0;  // smallest positive eigenvalue (or a lower bound)
  double t_valid = 0.0;
};

// Heat model built from a truncated spectrum with a tail law.
HeatModel heat_model(const Spectrum& sp);

ZetaEvaluation zeta_of_spectrum(const Spectrum& sp, cplx s, std::optional<Method> method = std::nullopt);
ZetaEvaluation zeta_mellin(const HeatModel& hm, cplx s);
// Sum over the complete part of the list plus a Weyl-law tail estimate; the
// error estimate is the size of that tail.
ZetaEvaluation zeta_direct(const Spectrum& sp, cplx s);
ZetaEvaluation zeta_closed_form(const Spectrum& sp, cplx s);

// Laurent data of zeta at a pole s0 of the closed-form continuation.
struct Laurent {
  double residue = 0.0;
  double finite_part = 0.0;
};
Laurent zeta_laurent(const Spectrum& sp, double s0);

struct LogDet {
  double log_det = 0.0;  // -zeta'(0), kernel excluded
  double zeta_at_zero = 0.0;
  double error_estimate = 0.0;
  Method method = Method::closed_form;
  int kernel_dim = 0;
};

LogDet log_det_zeta(const Spectrum& sp, std::optional<Method> method = std::nullopt);
LogDet log_det_mellin(const HeatModel& hm);
// exp(log_det_zeta); throws NumericalError if the result is not a positive finite number.
double det_zeta(const Spectrum& sp, std::optional<Method> method = std::nullopt);

// prod (1 + lambda_i); extra_log adds the log of an analytically summed tail.
double det_fredholm(const std::vector<double>& eigenvalues, double extra_log = 0.0);
double log_det_fredholm(const std::vector<double>& eigenvalues, double extra_log = 0.0);

// A diagonal operator A and its perturbation A(1 + K), both as spectra, with
// log det_F(1 + K) and the log of any modes handled outside the lemma.
struct DiagonalPair {
  Spectrum a;
  Spectrum ak;
  double log_det_fredholm = 0.0;
  double separate_log = 0.0;
  std::string label;
};

struct FactorizationReport {
  double log_lhs = 0.0;  // log det_zeta(A(1+K))
  double log_rhs = 0.0;  // log det_zeta(A) + log det_F(1+K) + separate modes
  double residual = 0.0;  // relative residual of the determinants
};

FactorizationReport factorization_check(const DiagonalPair& p);
// A = massless circle (primed), A(1+K) = massive circle; the zero mode m^2 is
// the separately handled factor.
DiagonalPair massless_to_massive_circle(double L, double m, long n_block);
// A = twisted circle at theta, A(1+K) = twisted circle at theta2.
DiagonalPair twist_shift(double L, double m, double theta, double theta2, long n_block);

// Per-mode Dirichlet-to-Neumann scalar on the cut circle of a torus of length L1.
double dn_mode_scalar(double mu, double L1);

struct BfkReport {
  double L1 = 0.0, L2 = 0.0, m = 0.0;
  long cutoff = 0;
  double log_det_torus = 0.0;       // 2D Mellin
  double log_det_dirichlet = 0.0;   // 2D Mellin on the cut cylinder
  double log_det_dn = 0.0;          // spectral zeta of the DN sequence
  double lhs = 0.0, rhs = 0.0;
  double constant_offset = 0.0;     // lhs - rhs
  double residual = 0.0;            // |lhs - rhs|
  double tail_bound = 0.0;          // bound on the neglected DN modes
  double log_det_torus_modes = 0.0;      // mode-sum regularization of the torus
  double log_det_dirichlet_modes = 0.0;  // mode-sum regularization of the cylinder
  double error_estimate = 0.0;
};

BfkReport bfk_torus_check(double L1, double L2, double m, long cutoff);

}  // namespace speclab::zeta
