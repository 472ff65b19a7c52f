#pragma once

#include <string>
#include <string_view>

namespace hetnet {

/// Which count of nulled small cells enters the nulling probability.
/// `degrees_of_freedom` uses M = ceil(beta (N - K)); `served_users` uses K.
enum class NullingCount { degrees_of_freedom, served_users };

/// Direction whose extra constraints `validate` should enforce.
enum class LinkContext { any, uplink, downlink };

/// Physical and system parameters of the two-tier network.
///
/// Distances are in meters, powers in watts, densities in nodes per square
/// meter. The SIR threshold is stored linear; use `db_to_linear` at the
/// boundary when the source is in dB.
struct NetworkParams {
  int n_antennas = 100;            ///< N, macro BS antennas
  int n_mues = 10;                 ///< K, served macro users
  double sc_density = 1e-4;        ///< lambda
  double dl_fraction = 0.5;        ///< q, probability a small cell is in downlink
  double pathloss_exponent = 4.0;  ///< alpha
  double sc_pair_distance = 10.0;  ///< d, SBS-SUE link length
  double macro_radius = 250.0;     ///< R_m
  double sir_threshold = 3.1622776601683795;  ///< T (linear), 5 dB
  double p_m = 1.0;                ///< macro BS transmit power
  double p_mu = 0.005;             ///< macro user transmit power
  double p_s = 0.1;                ///< small-cell BS transmit power
  double p_su = 0.005;             ///< small-cell user transmit power
  double nulling_fraction = 0.2;   ///< beta

  bool clamp_nulling_prob = true;
  NullingCount nulled_count = NullingCount::degrees_of_freedom;

  bool operator==(const NetworkParams&) const = default;
};

/// Constants that follow from a parameter set.
struct DerivedConstants {
  double c_alpha = 0.0;
  int nulled_count = 0;  ///< M
  int gain_shape = 0;    ///< theta; the ZF gain is Gamma(theta + 1, 1)
  double delta = 0.0;    ///< lambda C_alpha (K P_su T / P_m)^(2/alpha)
  double nulling_prob = 0.0;      ///< P(A) clamped to [0, 1]
  double nulling_prob_raw = 0.0;  ///< count / (lambda pi R_m^2), may exceed 1

  /// The nulling probability selected by the params' clamp mode.
  double effective_nulling_prob(bool clamp) const noexcept {
    return clamp ? nulling_prob : nulling_prob_raw;
  }
};

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// Throws ValidationError naming the first offending field.
const NetworkParams& validate(const NetworkParams& params,
                              LinkContext context = LinkContext::any);

/// Requires validated params.
DerivedConstants derive(const NetworkParams& params);

/// ceil that snaps values within a few ulps of an integer onto it, so that
/// e.g. 0.1 * 30 yields 3 rather than 4.
int snapped_ceil(double x) noexcept;

/// Parameters of the density-sweep figure: K = 10, P_s = 100 mW,
/// P_su = P_mu = 5 mW, alpha = 4, d = 10 m, T = 5 dB, R_m = 250 m.
NetworkParams fig1_params();

/// Parameters of the macro-vs-small-cell table: alpha = 4, P_m = 1 W,
/// R_m = 250 m, lambda = 1e-4, T = 5 dB. P_su = 0.1 W and d = 10 m are
/// inferred (the table does not state them).
NetworkParams table1_params(int n_mues, int n_antennas, double nulling_fraction);

/// Radial position densities used to average over node placements.
class RadialDensity {
 public:
  enum class Kind {
    mue_radial,     ///< distance of a uniform macro user to the center
    sc_radial,      ///< distance of a uniform small cell to the center
    disk_pairwise,  ///< distance between two independent uniform points
  };

  RadialDensity(Kind kind, double radius);

  Kind kind() const noexcept { return kind_; }
  double radius() const noexcept { return radius_; }
  double upper() const noexcept;
  double pdf(double x) const noexcept;

 private:
  Kind kind_;
  double radius_;
};

/// Parses the flat `key = value` configuration format. Keys match the
/// NetworkParams field names; the threshold is given as `sir_threshold_db`.
/// Unspecified keys keep the values from `base`.
NetworkParams parse_config(std::string_view text, NetworkParams base = {});
NetworkParams load_config(const std::string& path, NetworkParams base = {});

}  // namespace hetnet
