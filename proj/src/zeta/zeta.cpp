#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_psi.h>

#include <cmath>
#include <numbers>

#include "speclab/error.hpp"
#include "speclab/numerics.hpp"
#include "speclab/parallel.hpp"
#include "speclab/zeta.hpp"

namespace speclab::zeta {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
// Mellin split point t0 = ell^2 / kSplitDivisor leaves an exp(-40) remainder.
constexpr double kSplitDivisor = 160.0;
// Truncated traces must satisfy lambda_complete * t0 >= kTruncationExponent.
constexpr double kTruncationExponent = 37.0;

bool near_int_nonpositive(cplx z, int* k = nullptr) {
  if (std::abs(z.imag()) > 1e-13 || z.real() > 1e-13) return false;
  const double r = std::round(z.real());
  if (std::abs(z.real() - r) > 1e-13) return false;
  if (k) *k = static_cast<int>(-r);
  return true;
}

cplx cgamma(cplx z) {
  if (near_int_nonpositive(z)) throw NumericalError("gamma: pole");
  gsl_set_error_handler_off();
  gsl_sf_result lnr, arg;
  if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != GSL_SUCCESS)
    throw NumericalError("gamma: evaluation failed");
  return std::polar(std::exp(lnr.val), arg.val);
}

cplx cpow_pos(double base, cplx e) { return std::exp(e * std::log(base)); }

// First index n0 at which the binomial tail expansion converges with ratio <= 1/16.
int split_index(const ArithmeticBranch& br) {
  const double x = br.m2 / (br.c * br.c);
  const double need = 4.0 * std::sqrt(x);
  return need <= br.a ? 0 : static_cast<int>(std::ceil(need - br.a));
}

// Sum over one arithmetic branch of (c^2 (n+a)^2 + m2)^{-s}.
cplx branch_sum(const ArithmeticBranch& br, cplx s) {
  require(br.a > 0.0 && br.c > 0.0, "arithmetic branch: need a > 0 and c > 0");
  const double x = br.m2 / (br.c * br.c);
  const int n0 = split_index(br);
  cplx acc = 0.0;
  for (int n = 0; n < n0; ++n) {
    const double u = n + br.a;
    acc += cpow_pos(br.c * br.c * u * u + br.m2, -s);
  }
  const double b = br.a + n0;
  const cplx c2s = cpow_pos(br.c, -2.0 * s);
  cplx binom = 1.0;
  double xk = 1.0;
  for (int k = 0; k < 400; ++k) {
    if (std::abs(binom) == 0.0) break;
    const cplx arg = 2.0 * s + 2.0 * static_cast<double>(k);
    if (std::abs(arg - 1.0) < 1e-12) throw NumericalError("zeta: pole of the continuation at s");
    const cplx term = binom * xk * c2s * numerics::lerch_sum(arg, b);
    acc += term;
    if (k > 2 && std::abs(term) < 1e-18 * std::max(1.0, std::abs(acc))) break;
    binom *= (-s - static_cast<double>(k)) / static_cast<double>(k + 1);
    xk *= x;
    if (x == 0.0) break;
  }
  return acc;
}

// zeta'(0) and zeta(0) of a single branch.
void branch_at_zero(const ArithmeticBranch& br, double* deriv, double* value) {
  const double x = br.m2 / (br.c * br.c);
  const int n0 = split_index(br);
  double d = 0.0;
  for (int n = 0; n < n0; ++n) {
    const double u = n + br.a;
    d -= std::log(br.c * br.c * u * u + br.m2);
  }
  const double b = br.a + n0;
  const double z0 = 0.5 - b;
  d += -2.0 * std::log(br.c) * z0 + 2.0 * numerics::hurwitz_deriv_at_zero(b);
  if (x > 0.0) {
    double xk = 1.0;
    for (int k = 1; k < 400; ++k) {
      xk *= x;
      const double term = ((k % 2) ? -1.0 : 1.0) / k * xk * numerics::lerch_sum(2.0 * k, b);
      d += term;
      if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(d))) break;
    }
  }
  *deriv = d;
  *value = n0 + z0;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::direct_sum: return "direct-sum";
    case Method::mellin_split: return "mellin-split";
    case Method::closed_form: return "closed-form";
  }
  return "unknown";
}

HeatModel heat_model(const Spectrum& sp) {
  if (!sp.tail) throw PreconditionError("heat_model: spectrum has no tail law");
  HeatModel hm;
  const std::vector<double>* ev = &sp.eigenvalues;
  hm.trace = [ev](double t) {
    return par::sum(ev->size(), [&](std::size_t i) { return std::exp(-t * (*ev)[i]); });
  };
  hm.heat = sp.tail->heat;
  hm.ell = sp.tail->ell;
  hm.kernel_dim = sp.kernel_dim;
  hm.gap = sp.smallest_positive();
  hm.t_valid = kTruncationExponent / sp.truncation.complete_below;
  return hm;
}

namespace {

struct MellinParts {
  double split = 0.0;
  double t_end = 0.0;
  std::vector<HeatTerm> flat;    // mu = 0 terms, kernel term included
  std::vector<HeatTerm> massive;  // mu > 0 terms
};

MellinParts mellin_parts(const HeatModel& hm) {
  require(static_cast<bool>(hm.trace), "mellin: heat model has no trace");
  require(hm.ell > 0.0, "mellin: remainder scale must be positive");
  MellinParts p;
  p.split = hm.ell * hm.ell / kSplitDivisor;
  if (hm.t_valid > p.split)
    throw NumericalError("mellin: spectrum truncated too low for the split point (need more modes)");
  for (const HeatTerm& h : hm.heat) (h.mu > 0.0 ? p.massive : p.flat).push_back(h);
  if (hm.kernel_dim > 0) p.flat.push_back({-static_cast<double>(hm.kernel_dim), 0.0, 0.0});
  double rate = hm.gap;
  for (const HeatTerm& h : p.massive) rate = std::min(rate, h.mu);
  if (!(rate > 0.0) || !std::isfinite(rate)) throw NumericalError("mellin: no positive decay rate");
  p.t_end = p.split + 46.0 / rate;
  return p;
}

// Integral over [split, t_end] of t^{s-1} (trace - kernel - massive terms).
cplx large_time_integral(const HeatModel& hm, const MellinParts& p, cplx s, int per_panel) {
  cplx acc = 0.0;
  double lo = p.split;
  while (lo < p.t_end) {
    const double hi = std::min(2.0 * lo, p.t_end);
    const numerics::QuadratureRule q = numerics::gauss_legendre(per_panel, std::log(lo), std::log(hi));
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double t = std::exp(q.nodes[i]);
      double f = hm.trace(t) - hm.kernel_dim;
      for (const HeatTerm& h : p.massive) f -= h.c * std::pow(t, h.alpha) * std::exp(-h.mu * t);
      acc += q.weights[i] * cpow_pos(t, s) * f;
    }
    lo = hi;
  }
  return acc;
}

}  // namespace

ZetaEvaluation zeta_mellin(const HeatModel& hm, cplx s) {
  if (std::abs(s) < 1e-14) {
    const LogDet ld = log_det_mellin(hm);
    return {s, ld.zeta_at_zero, Method::mellin_split, ld.error_estimate};
  }
  if (near_int_nonpositive(s)) throw NumericalError("zeta_mellin: negative integer s needs the closed-form route");
  const MellinParts p = mellin_parts(hm);
  cplx total = 0.0;
  for (const HeatTerm& h : p.flat) {
    const cplx e = s + h.alpha;
    if (std::abs(e) < 1e-13) throw NumericalError("zeta_mellin: pole of the continuation at s");
    total += h.c * cpow_pos(p.split, e) / e;
  }
  for (const HeatTerm& h : p.massive) total += h.c * cgamma(s + h.alpha) * cpow_pos(h.mu, -(s + h.alpha));
  const cplx fine = large_time_integral(hm, p, s, 24);
  const cplx coarse = large_time_integral(hm, p, s, 16);
  total += fine;
  const cplx g = cgamma(s);
  ZetaEvaluation z{s, total / g, Method::mellin_split, 0.0};
  // Floor covers rounding in the trace sums and the exp(-40) split remainder.
  z.error_estimate = std::abs(fine - coarse) / std::abs(g) + 1e-11 * (1.0 + std::abs(z.value));
  return z;
}

LogDet log_det_mellin(const HeatModel& hm) {
  const MellinParts p = mellin_parts(hm);
  double r = 0.0, f0 = 0.0;
  const double lt = std::log(p.split);
  for (const HeatTerm& h : p.flat) {
    if (std::abs(h.alpha) < 1e-14) {
      r += h.c;
      f0 += h.c * lt;
    } else {
      f0 += h.c * std::exp(h.alpha * lt) / h.alpha;
    }
  }
  for (const HeatTerm& h : p.massive) {
    int k = 0;
    if (near_int_nonpositive(cplx(h.alpha, 0.0), &k)) {
      double coef = h.c * std::pow(h.mu, k);
      for (int i = 1; i <= k; ++i) coef /= -static_cast<double>(i);
      r += coef;
      f0 += coef * (gsl_sf_psi_int(k + 1) - std::log(h.mu));
    } else {
      f0 += h.c * std::tgamma(h.alpha) * std::pow(h.mu, -h.alpha);
    }
  }
  const double fine = large_time_integral(hm, p, 0.0, 24).real();
  const double coarse = large_time_integral(hm, p, 0.0, 16).real();
  f0 += fine;
  LogDet ld;
  ld.zeta_at_zero = r;
  ld.log_det = -(f0 + kEulerGamma * r);
  ld.error_estimate = std::abs(fine - coarse) + 1e-14 * (1.0 + std::abs(ld.log_det));
  ld.method = Method::mellin_split;
  ld.kernel_dim = hm.kernel_dim;
  return ld;
}

ZetaEvaluation zeta_closed_form(const Spectrum& sp, cplx s) {
  if (!sp.tail || sp.tail->branches.empty())
    throw PreconditionError("zeta_closed_form: spectrum is not arithmetic");
  cplx acc = 0.0;
  for (const ArithmeticBranch& br : sp.tail->branches) acc += static_cast<double>(br.multiplicity) * branch_sum(br, s);
  for (double lam : sp.tail->isolated)
    if (lam >= Spectrum::kKernelTol) acc += cpow_pos(lam, -s);
  return {s, acc, Method::closed_form, 1e-14 * (1.0 + std::abs(acc))};
}

Laurent zeta_laurent(const Spectrum& sp, double s0) {
  if (!sp.tail || sp.tail->branches.empty())
    throw PreconditionError("zeta_laurent: spectrum is not arithmetic");
  Laurent out;
  for (const ArithmeticBranch& br : sp.tail->branches) {
    const double x = br.m2 / (br.c * br.c);
    const int n0 = split_index(br);
    double fp = 0.0, res = 0.0;
    for (int n = 0; n < n0; ++n) {
      const double u = n + br.a;
      fp += std::pow(br.c * br.c * u * u + br.m2, -s0);
    }
    const double b = br.a + n0;
    const double c2s = std::pow(br.c, -2.0 * s0);
    double binom = 1.0, xk = 1.0;
    double dlog_binom = 0.0;  // d/ds log binom(-s, k)
    for (int k = 0; k < 400; ++k) {
      const double arg = 2.0 * s0 + 2.0 * k;
      const double g = binom * xk * c2s;
      if (std::abs(arg - 1.0) < 1e-12) {
        res += 0.5 * g;
        fp += g * (0.5 * (-2.0 * std::log(br.c) + dlog_binom) - gsl_sf_psi(b));
      } else if (g != 0.0) {
        fp += g * numerics::lerch_sum(arg, b);
      }
      if (k > 2 && std::abs(g) < 1e-18) break;
      dlog_binom += 1.0 / (s0 + k);
      binom *= (-s0 - k) / (k + 1.0);
      xk *= x;
      if (x == 0.0 && k > 0) break;
    }
    out.finite_part += br.multiplicity * fp;
    out.residue += br.multiplicity * res;
  }
  for (double lam : sp.tail->isolated)
    if (lam >= Spectrum::kKernelTol) out.finite_part += std::pow(lam, -s0);
  return out;
}

ZetaEvaluation zeta_direct(const Spectrum& sp, cplx s) {
  const std::vector<double>& ev = sp.eigenvalues;
  const double cut = sp.truncation.complete_below;
  cplx partial = par::csum(ev.size(), [&](std::size_t i) {
    const double lam = ev[i];
    return (lam >= Spectrum::kKernelTol && lam < cut) ? cpow_pos(lam, -s) : cplx(0.0);
  });
  ZetaEvaluation z{s, partial, Method::direct_sum, 0.0};
  if (sp.tail) {
    // Weyl-law tail from the most singular heat term c t^alpha.
    const HeatTerm* lead = nullptr;
    for (const HeatTerm& h : sp.tail->heat)
      if (h.alpha < 0.0 && (!lead || h.alpha < lead->alpha)) lead = &h;
    if (!lead) throw PreconditionError("zeta_direct: tail law lacks a Weyl term");
    if (s.real() + lead->alpha <= 0.0) throw PreconditionError("zeta_direct: series diverges at this s");
    const cplx e = s + lead->alpha;
    const cplx tail = lead->c / std::tgamma(-lead->alpha) * cpow_pos(cut, -e) / e;
    z.value += tail;
    z.error_estimate = std::abs(tail);
  }
  return z;
}

ZetaEvaluation zeta_of_spectrum(const Spectrum& sp, cplx s, std::optional<Method> method) {
  Method m;
  if (method) {
    m = *method;
  } else if (sp.is_finite()) {
    m = Method::direct_sum;
  } else if (!sp.tail->branches.empty()) {
    m = Method::closed_form;
  } else {
    m = Method::mellin_split;
  }
  switch (m) {
    case Method::direct_sum: return zeta_direct(sp, s);
    case Method::closed_form: return zeta_closed_form(sp, s);
    case Method::mellin_split: return zeta_mellin(heat_model(sp), s);
  }
  throw PreconditionError("zeta_of_spectrum: unknown method");
}

LogDet log_det_zeta(const Spectrum& sp, std::optional<Method> method) {
  Method m;
  if (method) {
    m = *method;
  } else if (sp.is_finite()) {
    m = Method::direct_sum;
  } else if (!sp.tail->branches.empty()) {
    m = Method::closed_form;
  } else {
    m = Method::mellin_split;
  }
  LogDet ld;
  ld.kernel_dim = sp.kernel_dim;
  ld.method = m;
  if (m == Method::direct_sum) {
    if (!sp.is_finite()) throw PreconditionError("log_det_zeta: direct sum needs a finite spectrum");
    double acc = 0.0;
    int count = 0;
    for (double lam : sp.eigenvalues) {
      if (std::abs(lam) < Spectrum::kKernelTol) continue;
      if (lam < 0.0) throw PreconditionError("log_det_zeta: negative eigenvalue");
      acc += std::log(lam);
      ++count;
    }
    ld.log_det = acc;
    ld.zeta_at_zero = count;
    ld.error_estimate = 1e-15 * count * (1.0 + std::abs(acc));
    return ld;
  }
  if (m == Method::mellin_split) {
    LogDet out = log_det_mellin(heat_model(sp));
    out.kernel_dim = sp.kernel_dim;
    return out;
  }
  if (!sp.tail || sp.tail->branches.empty()) throw PreconditionError("log_det_zeta: spectrum is not arithmetic");
  double d = 0.0, z = 0.0;
  for (const ArithmeticBranch& br : sp.tail->branches) {
    double bd = 0.0, bz = 0.0;
    branch_at_zero(br, &bd, &bz);
    d += br.multiplicity * bd;
    z += br.multiplicity * bz;
  }
  for (double lam : sp.tail->isolated)
    if (lam >= Spectrum::kKernelTol) {
      d -= std::log(lam);
      z += 1.0;
    }
  ld.log_det = -d;
  ld.zeta_at_zero = z;
  ld.error_estimate = 1e-14 * (1.0 + std::abs(d));
  return ld;
}

double det_zeta(const Spectrum& sp, std::optional<Method> method) {
  const LogDet ld = log_det_zeta(sp, method);
  const double v = std::exp(ld.log_det);
  if (!std::isfinite(v) || !(v > 0.0)) throw NumericalError("det_zeta: result is not a positive finite number");
  return v;
}

}  // namespace speclab::zeta
