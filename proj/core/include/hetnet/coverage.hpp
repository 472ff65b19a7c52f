#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hetnet/netmodel.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

enum class Method {
  closed_form,
  quadrature,
  position_averaged,  ///< quadrature plus averaging over random node positions
  monte_carlo,
};

enum class Tier { macro, small_cell };
enum class Direction { uplink, downlink };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Tier t) noexcept;
std::string_view to_string(Direction d) noexcept;

struct CoverageResult {
  double value = 0.0;
  Method method = Method::closed_form;
  double error_estimate = 0.0;  ///< absolute
  int n_terms = 1;              ///< Gamma-tail terms used
  bool extended_precision = false;  ///< some radius needed the 113-bit path
  double max_tail_error = 0.0;      ///< largest per-radius tail-sum error seen
};

struct AseResult {
  double value = 0.0;
  Tier tier = Tier::macro;
  Direction direction = Direction::uplink;
  std::vector<CoverageResult> coverage;
};

enum class Precision {
  automatic,  ///< double, escalating per radius when the tracked error exceeds 1e-6
  extended,   ///< 113-bit throughout
};

/// How the unconditioned distances to macro users are averaged out.
enum class PositionAveraging {
  quadrature,   ///< exact 1-D average against the known distance density
  monte_carlo,  ///< sampled placements, for sensitivity checks
};

struct EvalOptions {
  Precision precision = Precision::automatic;
  QuadratureOptions quadrature{1e-8, 1e-6, 4000};
  PositionAveraging positions = PositionAveraging::quadrature;
  std::uint64_t position_samples = 200000;
  std::uint64_t position_seed = 1;
};

// ---- uplink, macro tier -------------------------------------------------

/// P(SIR > T) for a tagged macro user with an N-antenna MRC receiver, averaged
/// over its uniform radial position. Interference is the downlink and uplink
/// small-cell processes plus the other K - 1 macro users.
CoverageResult uplink_mue_coverage(const NetworkParams& params, const EvalOptions& options = {});

struct CoverageBound {
  double value = 0.0;
  double error_estimate = 0.0;
  /// Radii in [0, trivial_below] used the bound 1 because the shifted
  /// transform argument was negative there.
  double trivial_below = 0.0;
};

struct BoundOptions {
  /// Raise DomainError instead of substituting the trivial bound.
  bool strict = false;
  QuadratureOptions quadrature{1e-8, 1e-6, 4000};
};

/// Upper bound on uplink_mue_coverage using the shifted-transform inequality.
CoverageBound uplink_mue_coverage_bound(const NetworkParams& params,
                                        const BoundOptions& options = {});

/// K p_c log2(1 + T).
AseResult macro_ase_ul(const NetworkParams& params, const EvalOptions& options = {});

/// Macro ASE with a receive vector uncorrelated with the desired channel:
/// K times the single-term coverage. No rate factor is applied.
AseResult macro_ase_ul_uncorrelated(const NetworkParams& params,
                                    const EvalOptions& options = {});

// ---- uplink, small-cell tier --------------------------------------------

/// Coverage of a typical small-cell user receiving its SBS (downlink cell).
CoverageResult sue_coverage_ul(const NetworkParams& params, const EvalOptions& options = {});
/// Coverage at a typical SBS receiving its user (uplink cell).
CoverageResult sbs_coverage_ul(const NetworkParams& params, const EvalOptions& options = {});

/// lambda [q p_SUE + (1 - q) p_SBS] log2(1 + T).
AseResult sc_ase_ul(const NetworkParams& params, const EvalOptions& options = {});

struct QOptimum {
  double q = 0.0;
  double ase = 0.0;
};

/// Maximizes sc_ase_ul over q in [0, 1] at density `density`: a 0.01 grid,
/// then golden-section refinement to |dq| < 1e-4. Values within a relative
/// 1e-12 are ties, resolved toward the smaller q.
QOptimum optimal_q(const NetworkParams& params, double density,
                   const EvalOptions& options = {});

// ---- downlink -----------------------------------------------------------

/// ZF downlink coverage of a macro user; the desired gain is
/// Gamma(theta + 1, 1) and interference comes from uplink small-cell users.
CoverageResult dl_mue_coverage(const NetworkParams& params, const EvalOptions& options = {});

/// (1 - exp(-Delta R^2)) / (Delta R^2); exact when every spare antenna nulls.
/// Evaluated from the params as given (beta is not checked), which is
/// what the full-nulling limit means.
CoverageResult dl_mue_coverage_closed_form(const NetworkParams& params);

/// K p_c log2(1 + T) with the downlink coverage.
AseResult macro_ase_dl(const NetworkParams& params, const EvalOptions& options = {});

/// Coverage of a randomly selected SBS, mixing the nulled and non-nulled
/// events; the SBS distance to the macro BS is averaged over the disk.
CoverageResult dl_sbs_coverage(const NetworkParams& params, const EvalOptions& options = {});

/// Coverage of the SBS given that the macro interference toward it is
/// nulled (event A) or not (its complement), conditioned on distance D.
double dl_sbs_coverage_nulled(const NetworkParams& params);
double dl_sbs_coverage_not_nulled(const NetworkParams& params, double distance);

/// lambda p_SBS log2(1 + T).
AseResult sc_ase_dl(const NetworkParams& params, const EvalOptions& options = {});

}  // namespace hetnet
