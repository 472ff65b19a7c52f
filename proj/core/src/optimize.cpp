#include <algorithm>
#include <cmath>

#include "coverage_internal.hpp"

namespace hetnet::detail {

namespace {

constexpr double kTieTolerance = 1e-12;

bool strictly_better(double candidate, double incumbent) {
  return candidate > incumbent + kTieTolerance * std::abs(incumbent);
}

}  // namespace

QOptimum maximize_on_unit_interval(const std::function<double(double)>& objective) {
  constexpr int kGrid = 100;
  QOptimum best{0.0, objective(0.0)};
  int best_index = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const double q = static_cast<double>(i) / kGrid;
    const double value = objective(q);
    if (strictly_better(value, best.ase)) {
      best = {q, value};
      best_index = i;
    }
  }

  // Golden-section search on the bracket around the grid winner.
  double lo = std::max(0.0, (best_index - 1) / static_cast<double>(kGrid));
  double hi = std::min(1.0, (best_index + 1) / static_cast<double>(kGrid));
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-4) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double refined_q = 0.5 * (lo + hi);
  const double refined = objective(refined_q);
  if (strictly_better(refined, best.ase)) best = {refined_q, refined};
  return best;
}

}  // namespace hetnet::detail
