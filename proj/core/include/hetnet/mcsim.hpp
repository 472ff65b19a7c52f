#pragma once

// Stochastic-geometry Monte Carlo oracle. Each drop places the small-cell
// Poisson process, the macro users and all fading marks from counter-based
// substreams addressed by (seed, drop index, purpose), so an estimate is a
// pure function of its configuration: worker count and scheduling never
// change a result.

#include <cstdint>
#include <vector>

#include "hetnet/netmodel.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

enum class Fidelity {
  distribution,  ///< sample the Gamma/Exp gains directly
  channel,       ///< build complex Gaussian channel vectors and MRC/ZF beams
};

struct DropConfig {
  NetworkParams params;
  double sim_radius = 0.0;  ///< truncation radius of the Poisson process; 0 selects 10 R_m
  std::uint64_t n_drops = 200000;
  std::uint64_t seed = 1;
  Fidelity fidelity = Fidelity::distribution;
  unsigned threads = 0;  ///< 0: hardware concurrency (capped by HETSIM_THREADS)

  double effective_sim_radius() const noexcept {
    return sim_radius > 0.0 ? sim_radius : 10.0 * params.macro_radius;
  }
};

/// 99% two-sided normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;  ///< 99% confidence half-width
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t n_drops = 0;
  std::uint64_t seed = 0;

  bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

/// Wilson score interval for a Bernoulli proportion.
McEstimate wilson_interval(std::uint64_t hits, std::uint64_t n, std::uint64_t seed,
                           double z = kZ99);
/// Student-t interval from running sums of a sample.
McEstimate t_interval(double sum, double sum_sq, std::uint64_t n, std::uint64_t seed);
/// Multiplies mean and interval by a nonnegative constant.
McEstimate scaled(const McEstimate& e, double factor);

struct PolarPoint {
  double radius = 0.0;  ///< distance to the disk center
  double angle = 0.0;
};

/// Homogeneous PPP of the given density on the disk of radius `radius`.
std::vector<PolarPoint> sample_ppp_disk(double density, double radius, RandomStream& rng);
/// Same on the annulus inner <= |x| < outer.
std::vector<PolarPoint> sample_ppp_annulus(double density, double inner, double outer,
                                           RandomStream& rng);

/// One interfering small-cell transmitter seen from the receiver at the
/// disk center: its distance, duplex mark and fading gain.
struct SmallCellMark {
  double distance = 0.0;
  bool downlink = false;
  double gain = 0.0;
};

/// One uplink drop around the macro BS for a tagged macro user.
struct DropRealization {
  std::vector<SmallCellMark> small_cells;  ///< downlink w.p. q, else uplink
  std::vector<PolarPoint> mues;            ///< mues[0] is the tagged user
  double desired_gain = 0.0;               ///< ||h_k||^2
  std::vector<double> mue_gains;           ///< |h_m^H v_k|^2 for m != k
};

DropRealization realize_uplink_drop(const DropConfig& cfg, std::uint64_t drop);

/// Macro uplink coverage of a tagged macro user with an MRC receiver.
McEstimate estimate_uplink_mue_coverage(const DropConfig& cfg);

/// Small-cell uplink-phase coverage at a typical SUE (downlink cell) or SBS
/// (uplink cell). The receiver is uniform in the macro disk and its
/// transmitter sits at distance d.
McEstimate estimate_sue_coverage_ul(const DropConfig& cfg);
McEstimate estimate_sbs_coverage_ul(const DropConfig& cfg);

struct DownlinkEstimates {
  McEstimate mue;
  McEstimate sbs;
};

/// Reverse-TDD downlink: ZF macro users against uplink small cells, and a
/// random SBS that is nulled with probability P(A).
DownlinkEstimates estimate_dl_coverage(const DropConfig& cfg);

struct PppSpec {
  double density = 0.0;
  double radius = 0.0;
  double pathloss_exponent = 4.0;
};

/// Mean of exp(-s I) for shot noise I = sum P g R^-alpha with Exp(1) fading,
/// observed at the disk center.
McEstimate empirical_laplace(const PppSpec& ppp, double power, double s,
                             std::uint64_t n_samples, std::uint64_t seed = 1,
                             unsigned threads = 0);

// Channel-level gain samplers, exposed for distributional self-tests.

struct MrcGains {
  double desired = 0.0;       ///< ||h_k||^2 ~ Gamma(N, 1)
  std::vector<double> cross;  ///< |h_m^H h_k / ||h_k|| |^2 ~ Exp(1)
};
MrcGains sample_mrc_gains(int n_antennas, int n_users, RandomStream& rng);

/// |h_k^H w_k|^2 for normalized ZF against K users and `nulled` extra
/// directions; Gamma(N - K - nulled + 1, 1). Requires K + nulled <= N.
double sample_zf_desired_gain(int n_antennas, int n_users, int nulled, RandomStream& rng);

/// sum_k |f^H w_k|^2 at a non-nulled receiver f with normalized ZF beams w_k.
double sample_zf_leakage(int n_antennas, int n_users, int nulled, RandomStream& rng);

}  // namespace hetnet
