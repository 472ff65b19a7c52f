#pragma once

// Laplace-transform derivative engine.
//
// A DerivativeArray holds the value of a Laplace transform L and its first
// `order` derivatives at a point s > 0, stored as scaled Taylor coefficients
//
//     t_j = h^j L^(j)(s) / j!,   h = s (or 1 when s == 0),
//
// multiplied by a shared factor exp(log_scale). In this form the Gamma tail
// sum  sum_n (-s)^n / n! L^(n)(s)  is simply  sum_n (-1)^n t_n, products of
// transforms are Cauchy convolutions, and no factorial ever has to be formed,
// which keeps orders of a few hundred inside double range.
//
// Every routine is templated on the working precision so that callers can
// rerun a computation in ExtendedReal when the tracked rounding error of the
// double path is too large.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hetnet/errors.hpp"
#include "hetnet/netmodel.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

/// 113-bit binary floating point, used for the escalation path.
using ExtendedReal = boost::multiprecision::cpp_bin_float_quad;

/// (2 pi^2 / alpha) csc(2 pi / alpha). Throws DomainError for alpha <= 2.
double c_alpha(double alpha);

template <typename Real>
struct BasicDerivativeArray {
  double s = 0.0;
  double step = 1.0;
  Real log_scale = 0;
  std::vector<Real> coeffs;   ///< t_j / exp(log_scale)
  std::vector<Real> abs_err;  ///< rounding-error bound on each entry of coeffs

  int order() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  /// h^j L^(j)(s) / j!
  Real scaled(int j) const {
    using std::exp;
    return coeffs.at(static_cast<std::size_t>(j)) * exp(log_scale);
  }

  /// L^(j)(s); may overflow for large j at small s.
  double derivative(int j) const {
    using std::exp;
    using std::log;
    const double t = static_cast<double>(coeffs.at(static_cast<std::size_t>(j)));
    if (t == 0.0) return 0.0;
    const double log_mag = static_cast<double>(log_scale) + std::lgamma(j + 1.0) -
                           j * std::log(step) + std::log(std::abs(t));
    return std::copysign(std::exp(log_mag), t);
  }

  std::vector<double> derivatives() const {
    std::vector<double> out;
    out.reserve(coeffs.size());
    for (int j = 0; j <= order(); ++j) out.push_back(derivative(j));
    return out;
  }

  template <typename Other>
  BasicDerivativeArray<Other> convert() const {
    BasicDerivativeArray<Other> out;
    out.s = s;
    out.step = step;
    out.log_scale = static_cast<Other>(log_scale);
    out.coeffs.reserve(coeffs.size());
    out.abs_err.reserve(abs_err.size());
    for (const auto& c : coeffs) out.coeffs.push_back(static_cast<Other>(c));
    for (const auto& e : abs_err) out.abs_err.push_back(static_cast<Other>(e));
    return out;
  }
};

using DerivativeArray = BasicDerivativeArray<double>;
using ExtendedDerivativeArray = BasicDerivativeArray<ExtendedReal>;

struct TailSum {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

template <typename Real>
Real epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

inline double step_for(double s) { return s > 0.0 ? s : 1.0; }

/// Rescales coefficients so the largest magnitude is near 1.
template <typename Real>
void normalize(BasicDerivativeArray<Real>& a) {
  using std::abs;
  using std::log;
  Real biggest = 0;
  for (const auto& c : a.coeffs) biggest = std::max<Real>(biggest, abs(c));
  if (biggest == 0) return;
  if (biggest > Real(1e100) || biggest < Real(1e-100)) {
    const Real inv = 1 / biggest;
    for (auto& c : a.coeffs) c *= inv;
    for (auto& e : a.abs_err) e *= inv;
    a.log_scale += log(biggest);
  }
}

}  // namespace detail

/// [1, 0, 0, ...]: the transform of zero interference.
template <typename Real = double>
BasicDerivativeArray<Real> constant_derivatives(double s, int order) {
  if (order < 0) throw std::invalid_argument("order must be nonnegative");
  BasicDerivativeArray<Real> out;
  out.s = s;
  out.step = detail::step_for(s);
  out.coeffs.assign(static_cast<std::size_t>(order) + 1, Real(0));
  out.abs_err.assign(out.coeffs.size(), Real(0));
  out.coeffs[0] = 1;
  return out;
}

/// Derivatives of exp(-a s^(2/alpha)) at s > 0 via the exp-composite
/// recursion  n t_n = sum_{k=1..n} k g_k t_{n-k}  on scaled coefficients,
/// where g_k = -a s^(2/alpha) binom(2/alpha, k) are the scaled Taylor
/// coefficients of the exponent.
template <typename Real = double>
BasicDerivativeArray<Real> exp_stable_derivatives(double a, double alpha, double s, int order) {
  using std::abs;
  if (!(a >= 0.0)) throw DomainError("exp_stable_derivatives: a must be nonnegative");
  if (!(alpha > 2.0)) throw DomainError("exp_stable_derivatives: alpha must exceed 2");
  if (!(s > 0.0)) {
    throw DomainError("exp_stable_derivatives: s must be positive (fractional power is "
                      "singular at 0)");
  }
  auto out = constant_derivatives<Real>(s, order);
  if (a == 0.0) return out;

  const Real delta = Real(2) / Real(alpha);
  using std::pow;
  const Real exponent_scale = Real(a) * pow(Real(s), delta);
  out.log_scale = -exponent_scale;

  const auto n_max = static_cast<std::size_t>(order);
  std::vector<Real> weighted(n_max + 1, Real(0));  // k * g_k
  Real binom = 1;
  for (std::size_t k = 1; k <= n_max; ++k) {
    binom *= (delta - Real(static_cast<double>(k - 1))) / Real(static_cast<double>(k));
    weighted[k] = Real(static_cast<double>(k)) * (-exponent_scale * binom);
  }

  const Real eps = detail::epsilon<Real>();
  for (std::size_t n = 1; n <= n_max; ++n) {
    Real acc = 0;
    Real acc_abs = 0;
    Real acc_err = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const Real term = weighted[k] * out.coeffs[n - k];
      acc += term;
      acc_abs += abs(term);
      acc_err += abs(weighted[k]) * out.abs_err[n - k];
    }
    const Real inv_n = Real(1) / Real(static_cast<double>(n));
    out.coeffs[n] = acc * inv_n;
    out.abs_err[n] = (acc_err + Real(static_cast<double>(2 * n + 4)) * eps * acc_abs) * inv_n;

    if (abs(out.coeffs[n]) > Real(1e150)) {
      const Real shrink = Real(1e-150);
      for (std::size_t j = 0; j <= n; ++j) {
        out.coeffs[j] *= shrink;
        out.abs_err[j] *= shrink;
      }
      using std::log;
      out.log_scale -= log(shrink);
    }
  }
  detail::normalize(out);
  return out;
}

/// Derivatives of (1 + c s)^(-1); exact closed form (-c)^n n! (1+cs)^-(n+1).
template <typename Real = double>
BasicDerivativeArray<Real> rational_derivatives(double c, double s, int order) {
  using std::abs;
  if (!(c >= 0.0)) throw DomainError("rational_derivatives: c must be nonnegative");
  if (!(1.0 + c * s > 0.0)) throw DomainError("rational_derivatives: 1 + c s must be positive");
  auto out = constant_derivatives<Real>(s, order);
  const Real eps = detail::epsilon<Real>();
  if (s > 0.0) {
    const Real u = Real(c) * Real(s);
    const Real ratio = -u / (1 + u);
    Real t = 1 / (1 + u);
    for (std::size_t n = 0; n < out.coeffs.size(); ++n) {
      out.coeffs[n] = t;
      out.abs_err[n] = Real(static_cast<double>(2 * n + 3)) * eps * abs(t);
      t *= ratio;
    }
  } else {
    Real t = 1;
    for (std::size_t n = 0; n < out.coeffs.size(); ++n) {
      out.coeffs[n] = t;
      out.abs_err[n] = Real(static_cast<double>(n + 1)) * eps * abs(t);
      t *= -Real(c);
    }
  }
  detail::normalize(out);
  return out;
}

/// Derivatives of exp(-b s): the transform of deterministic interference.
template <typename Real = double>
BasicDerivativeArray<Real> degenerate_exponential_derivatives(double b, double s, int order) {
  using std::abs;
  if (!(b >= 0.0)) throw DomainError("degenerate_exponential_derivatives: b must be nonnegative");
  auto out = constant_derivatives<Real>(s, order);
  const Real eps = detail::epsilon<Real>();
  const Real x = Real(b) * Real(out.step);
  out.log_scale = -Real(b) * Real(s);
  Real t = 1;
  for (std::size_t n = 0; n < out.coeffs.size(); ++n) {
    out.coeffs[n] = t;
    out.abs_err[n] = Real(static_cast<double>(2 * n + 1)) * eps * abs(t);
    t *= -x / Real(static_cast<double>(n + 1));
    if (abs(t) > Real(1e150)) {
      const Real shrink = Real(1e-150);
      for (std::size_t j = 0; j <= n; ++j) {
        out.coeffs[j] *= shrink;
        out.abs_err[j] *= shrink;
      }
      t *= shrink;
      using std::log;
      out.log_scale -= log(shrink);
    }
  }
  detail::normalize(out);
  return out;
}

/// Leibniz rule on two arrays sharing s and order.
template <typename Real>
BasicDerivativeArray<Real> multiply(const BasicDerivativeArray<Real>& a,
                                    const BasicDerivativeArray<Real>& b) {
  using std::abs;
  if (a.s != b.s || a.order() != b.order()) {
    throw std::invalid_argument("product_derivatives: arrays differ in s or order");
  }
  BasicDerivativeArray<Real> out;
  out.s = a.s;
  out.step = a.step;
  out.log_scale = a.log_scale + b.log_scale;
  const std::size_t len = a.coeffs.size();
  out.coeffs.assign(len, Real(0));
  out.abs_err.assign(len, Real(0));
  const Real eps = detail::epsilon<Real>();
  for (std::size_t n = 0; n < len; ++n) {
    Real acc = 0;
    Real acc_abs = 0;
    Real acc_err = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      const Real term = a.coeffs[k] * b.coeffs[n - k];
      acc += term;
      acc_abs += abs(term);
      acc_err += abs(a.coeffs[k]) * b.abs_err[n - k] + a.abs_err[k] * abs(b.coeffs[n - k]) +
                 a.abs_err[k] * b.abs_err[n - k];
    }
    out.coeffs[n] = acc;
    out.abs_err[n] = acc_err + Real(static_cast<double>(n + 2)) * eps * acc_abs;
  }
  detail::normalize(out);
  return out;
}

/// Folds `multiply` over the factors left to right. An empty list is an error.
template <typename Real>
BasicDerivativeArray<Real> product_derivatives(std::span<const BasicDerivativeArray<Real>> factors) {
  if (factors.empty()) throw std::invalid_argument("product_derivatives: no factors");
  BasicDerivativeArray<Real> acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = multiply(acc, factors[i]);
  return acc;
}

/// a^k by binary exponentiation; k = 0 gives the constant array.
template <typename Real>
BasicDerivativeArray<Real> power(const BasicDerivativeArray<Real>& a, int k) {
  if (k < 0) throw std::invalid_argument("power: exponent must be nonnegative");
  auto result = constant_derivatives<Real>(a.s, a.order());
  auto base = a;
  while (k > 0) {
    if (k & 1) result = multiply(result, base);
    k >>= 1;
    if (k > 0) base = multiply(base, base);
  }
  return result;
}

/// Sum_{n < n_terms} (-s)^n / n! L^(n)(s) with Neumaier summation and an
/// error estimate covering both the stored coefficient errors and the
/// summation itself. The value is not range-checked.
template <typename Real>
TailSum gamma_tail_sum_raw(const BasicDerivativeArray<Real>& d, int n_terms) {
  using std::abs;
  using std::exp;
  if (n_terms < 1 || n_terms > d.order() + 1) {
    throw std::invalid_argument("gamma_tail_sum: n_terms must lie in [1, order + 1]");
  }
  const Real eps = detail::epsilon<Real>();
  // The stored coefficients already carry h^n = s^n unless s == 0.
  const std::size_t used = d.s > 0.0 ? static_cast<std::size_t>(n_terms) : 1;
  Real sum = 0;
  Real compensation = 0;
  Real abs_sum = 0;
  Real coeff_err = 0;
  for (std::size_t n = 0; n < used; ++n) {
    const Real term = (n % 2 == 0) ? d.coeffs[n] : -d.coeffs[n];
    const Real t = sum + term;
    if (abs(sum) >= abs(term)) {
      compensation += (sum - t) + term;
    } else {
      compensation += (term - t) + sum;
    }
    sum = t;
    abs_sum += abs(term);
    coeff_err += d.abs_err[n];
  }
  sum += compensation;
  const Real scale = exp(d.log_scale);
  TailSum out;
  out.value = static_cast<double>(sum * scale);
  out.error_estimate = static_cast<double>((coeff_err + Real(4) * eps * abs_sum) * scale);
  return out;
}

/// Range-checked Gamma tail sum. Values outside [0, 1] by no more than the
/// error estimate are clamped; larger excursions, or an error estimate above
/// `tolerance`, raise AccuracyError.
template <typename Real>
TailSum gamma_tail_sum(const BasicDerivativeArray<Real>& d, int n_terms,
                       double tolerance = 1e-6) {
  TailSum out = gamma_tail_sum_raw(d, n_terms);
  if (!(out.error_estimate <= tolerance)) {
    throw AccuracyError("gamma_tail_sum: cancellation error estimate " +
                        std::to_string(out.error_estimate) + " exceeds " +
                        std::to_string(tolerance) +
                        "; use the extended-precision path or the Monte Carlo estimator");
  }
  if (out.value < 0.0) {
    if (out.value < -out.error_estimate) {
      throw AccuracyError("gamma_tail_sum: negative probability " + std::to_string(out.value));
    }
    out.value = 0.0;
  } else if (out.value > 1.0) {
    if (out.value > 1.0 + out.error_estimate) {
      throw AccuracyError("gamma_tail_sum: probability above one " + std::to_string(out.value));
    }
    out.value = 1.0;
  }
  return out;
}

/// Upper bound  sum_{n < n_terms} s^n / n! L(s - n/e)  on the Gamma tail
/// sum. Throws DomainError, naming n, when a shifted argument is negative.
double gamma_tail_bound(const std::function<double(double)>& laplace, double s, int n_terms);

/// Smallest s at which gamma_tail_bound is defined for `n_terms` terms.
double gamma_tail_bound_min_s(int n_terms) noexcept;

/// Derivatives at s of E[(1 + s / Y)^(-1)], Y = inv_rate(X), X ~ density.
/// Writing the rate through its reciprocal keeps the integrand finite where
/// the rate diverges (Y -> 0 gives a vanishing contribution).
DerivativeArray rational_mixture_derivatives(const std::function<double(double)>& inv_rate,
                                             const RadialDensity& density, double s, int order,
                                             const QuadratureOptions& quad = {1e-12, 1e-10,
                                                                              4000});

/// Value-only variant of rational_mixture_derivatives.
double rational_mixture_value(const std::function<double(double)>& inv_rate,
                              const RadialDensity& density, double s,
                              const QuadratureOptions& quad = {1e-13, 1e-11, 4000});

}  // namespace hetnet
