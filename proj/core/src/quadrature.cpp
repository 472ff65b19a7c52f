#include "hetnet/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace hetnet {

namespace {

// Kronrod abscissae on [0, 1); the odd-indexed ones are the 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> value;
  std::vector<double> error;
  double worst = 0.0;  // largest error relative to its tolerance share

  bool operator<(const Segment& other) const { return worst < other.worst; }
};

// One GK15 panel for a dim-component integrand.
void panel(const VectorIntegrand& f, std::size_t dim, double lo, double hi, Segment& seg,
           std::vector<double>& scratch, int& evaluations) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<double> kronrod(dim, 0.0);
  std::vector<double> gauss(dim, 0.0);
  scratch.assign(dim, 0.0);

  f(center, scratch);
  ++evaluations;
  for (std::size_t i = 0; i < dim; ++i) {
    kronrod[i] = kKronrodWeights[7] * scratch[i];
    gauss[i] = kGaussWeights[3] * scratch[i];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    for (const double x : {center - dx, center + dx}) {
      f(x, scratch);
      ++evaluations;
      for (std::size_t i = 0; i < dim; ++i) {
        kronrod[i] += kKronrodWeights[j] * scratch[i];
        if (j % 2 == 1) gauss[i] += kGaussWeights[j / 2] * scratch[i];
      }
    }
  }
  seg.lo = lo;
  seg.hi = hi;
  seg.value.resize(dim);
  seg.error.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    seg.value[i] = kronrod[i] * half;
    seg.error[i] = std::abs((kronrod[i] - gauss[i]) * half);
  }
}

}  // namespace

VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double lo,
                                        double hi, const QuadratureOptions& options) {
  VectorQuadratureResult result;
  result.value.assign(dim, 0.0);
  result.error.assign(dim, 0.0);
  if (dim == 0 || hi <= lo) {
    result.converged = true;
    return result;
  }

  std::vector<double> scratch;
  std::vector<double> total(dim, 0.0);
  std::vector<double> total_err(dim, 0.0);
  std::priority_queue<Segment> heap;

  const double width = hi - lo;
  auto score = [&](Segment& seg) {
    // Each segment gets a tolerance share proportional to its width.
    const double share = (seg.hi - seg.lo) / width;
    seg.worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double tol =
          std::max(options.abs_tol, options.rel_tol * std::abs(total[i])) * share;
      seg.worst = std::max(seg.worst, seg.error[i] / std::max(tol, 1e-300));
    }
  };

  Segment first;
  panel(f, dim, lo, hi, first, scratch, result.evaluations);
  total = first.value;
  total_err = first.error;
  heap.push(first);

  auto converged = [&] {
    for (std::size_t i = 0; i < dim; ++i) {
      const double tol = std::max(options.abs_tol, options.rel_tol * std::abs(total[i]));
      if (total_err[i] > tol) return false;
    }
    return true;
  };

  int intervals = 1;
  while (!converged() && intervals < options.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push(worst);
      break;
    }
    Segment left;
    Segment right;
    panel(f, dim, worst.lo, mid, left, scratch, result.evaluations);
    panel(f, dim, mid, worst.hi, right, scratch, result.evaluations);
    for (std::size_t i = 0; i < dim; ++i) {
      total[i] += left.value[i] + right.value[i] - worst.value[i];
      total_err[i] += left.error[i] + right.error[i] - worst.error[i];
    }
    score(left);
    score(right);
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++intervals;

    // Rescore periodically since tolerances track the running totals.
    if (intervals % 64 == 0) {
      std::vector<Segment> all;
      all.reserve(heap.size());
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (auto& seg : all) {
        score(seg);
        heap.push(std::move(seg));
      }
    }
  }

  // Re-add from the segments to drop accumulated cancellation in the totals.
  std::fill(result.value.begin(), result.value.end(), 0.0);
  while (!heap.empty()) {
    const Segment& seg = heap.top();
    for (std::size_t i = 0; i < dim; ++i) {
      result.value[i] += seg.value[i];
      result.error[i] += seg.error[i];
    }
    heap.pop();
  }
  result.converged = converged();
  return result;
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options) {
  const auto vec = integrate_vector(
      [&f](double x, std::span<double> out) { out[0] = f(x); }, 1, lo, hi, options);
  return {vec.value[0], vec.error[0], vec.evaluations, vec.converged};
}

}  // namespace hetnet
