#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hetnet {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct VectorQuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) integration of a scalar integrand over
/// [lo, hi]. Never samples the endpoints, so integrable endpoint
/// singularities are tolerated.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options = {});

/// Vector-valued variant: `f(x, out)` writes `dim` components into `out`.
/// Bisection continues until every component meets
/// max(abs_tol, rel_tol * |value_i|).
using VectorIntegrand = std::function<void(double, std::span<double>)>;
VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double lo,
                                        double hi, const QuadratureOptions& options = {});

}  // namespace hetnet
