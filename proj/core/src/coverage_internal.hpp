#pragma once

#include <functional>

#include "hetnet/coverage.hpp"
#include "hetnet/xform.hpp"

namespace hetnet::detail {

double rate_factor(const NetworkParams& p);

/// Builds the same transform product in both working precisions.
struct TailBuilder {
  std::function<DerivativeArray()> as_double;
  std::function<ExtendedDerivativeArray()> as_extended;
};

struct TailOutcome {
  double value = 0.0;
  double error = 0.0;
  bool extended = false;
};

/// Gamma tail sum with escalation to ExtendedReal when the double result
/// cannot be certified. `radius` only labels errors.
TailOutcome run_tail(const TailBuilder& build, int n_terms, Precision precision, double radius);

/// Grid search on [0, 1] at step 0.01 followed by golden-section refinement.
QOptimum maximize_on_unit_interval(const std::function<double(double)>& objective);

}  // namespace hetnet::detail
