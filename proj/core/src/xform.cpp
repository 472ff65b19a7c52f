#include "hetnet/xform.hpp"

#include <cmath>
#include <numbers>

namespace hetnet {

double c_alpha(double alpha) {
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    throw DomainError("c_alpha: pathloss exponent must exceed 2 (csc pole at alpha = 2)");
  }
  const double pi = std::numbers::pi;
  return (2.0 * pi * pi / alpha) / std::sin(2.0 * pi / alpha);
}

double gamma_tail_bound_min_s(int n_terms) noexcept {
  return n_terms <= 1 ? 0.0 : (n_terms - 1) / std::numbers::e;
}

double gamma_tail_bound(const std::function<double(double)>& laplace, double s, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("gamma_tail_bound: n_terms must be positive");
  if (!(s >= 0.0)) throw DomainError("gamma_tail_bound: s must be nonnegative");
  double sum = 0.0;
  for (int n = 0; n < n_terms; ++n) {
    const double shifted = s - n / std::numbers::e;
    if (shifted < 0.0) {
      throw DomainError("gamma_tail_bound: shifted argument s - n/e = " +
                        std::to_string(shifted) + " is negative at n = " + std::to_string(n));
    }
    const double weight =
        n == 0 ? 1.0 : std::exp(n * std::log(s) - std::lgamma(n + 1.0));
    sum += weight * laplace(shifted);
  }
  return sum;
}

DerivativeArray rational_mixture_derivatives(const std::function<double(double)>& inv_rate,
                                             const RadialDensity& density, double s, int order,
                                             const QuadratureOptions& quad) {
  if (!(s > 0.0)) throw DomainError("rational_mixture_derivatives: s must be positive");
  if (order < 0) throw std::invalid_argument("order must be nonnegative");
  const std::size_t dim = static_cast<std::size_t>(order) + 1;

  // Component n integrates (-1)^n w^n v with v = y/(1+y), w = 1/(1+y),
  // y = Y/s; this equals (-u)^n/(1+u)^(n+1) for u = s/Y.
  auto integrand = [&](double x, std::span<double> out) {
    const double weight = density.pdf(x);
    const double y = inv_rate(x) / s;
    const double v = std::isinf(y) ? 1.0 : y / (1.0 + y);
    const double w = std::isinf(y) ? 0.0 : 1.0 / (1.0 + y);
    double t = weight * v;
    for (std::size_t n = 0; n < dim; ++n) {
      out[n] = t;
      t *= -w;
    }
  };
  const auto result = integrate_vector(integrand, dim, 0.0, density.upper(), quad);
  if (!result.converged) {
    throw AccuracyError("rational_mixture_derivatives: position average did not converge");
  }
  DerivativeArray out = constant_derivatives<double>(s, order);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t n = 0; n < dim; ++n) {
    out.coeffs[n] = result.value[n];
    out.abs_err[n] = result.error[n] + (2.0 * n + 8.0) * eps * std::abs(result.value[n]);
  }
  return out;
}

double rational_mixture_value(const std::function<double(double)>& inv_rate,
                              const RadialDensity& density, double s,
                              const QuadratureOptions& quad) {
  if (!(s >= 0.0)) throw DomainError("rational_mixture_value: s must be nonnegative");
  if (s == 0.0) return 1.0;
  const auto result = integrate(
      [&](double x) {
        const double y = inv_rate(x) / s;
        return std::isinf(y) ? density.pdf(x) : density.pdf(x) * y / (1.0 + y);
      },
      0.0, density.upper(), quad);
  if (!result.converged) {
    throw AccuracyError("rational_mixture_value: position average did not converge");
  }
  return result.value;
}

}  // namespace hetnet
