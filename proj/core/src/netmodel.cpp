#include "hetnet/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hetnet/errors.hpp"
#include "hetnet/xform.hpp"

namespace hetnet {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

int snapped_ceil(double x) noexcept {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(x));
}

namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

const NetworkParams& validate(const NetworkParams& p, LinkContext context) {
  require(p.n_antennas >= 1, "n_antennas", "must be at least 1");
  require(p.n_mues >= 0, "n_mues", "must be nonnegative");
  require(std::isfinite(p.sc_density) && p.sc_density >= 0.0, "sc_density",
          "must be finite and nonnegative");
  require(p.dl_fraction >= 0.0 && p.dl_fraction <= 1.0, "dl_fraction",
          "must lie in [0, 1]");
  require(std::isfinite(p.pathloss_exponent) && p.pathloss_exponent > 2.0,
          "pathloss_exponent", "pathloss exponent must exceed 2");
  require(positive_finite(p.sc_pair_distance), "sc_pair_distance", "must be positive");
  require(positive_finite(p.macro_radius), "macro_radius", "must be positive");
  require(p.sir_threshold > 0.0 && !std::isnan(p.sir_threshold), "sir_threshold",
          "must be positive");
  require(positive_finite(p.p_m), "p_m", "power must be positive");
  require(positive_finite(p.p_mu), "p_mu", "power must be positive");
  require(positive_finite(p.p_s), "p_s", "power must be positive");
  require(positive_finite(p.p_su), "p_su", "power must be positive");
  require(p.nulling_fraction >= 0.0 && p.nulling_fraction <= 1.0, "nulling_fraction",
          "must lie in [0, 1]");

  if (context == LinkContext::uplink) {
    require(p.n_mues >= 1, "n_mues", "uplink macro user analysis needs at least one user");
  }
  if (context == LinkContext::downlink) {
    require(p.n_mues >= 1, "n_mues", "downlink needs at least one served user");
    require(p.n_mues <= p.n_antennas, "n_mues",
            "downlink zero-forcing needs K <= N (K > N has no pseudoinverse)");
    if (!p.clamp_nulling_prob && p.sc_density == 0.0) {
      const DerivedConstants c = derive(p);
      require(c.nulled_count == 0, "sc_density",
              "unclamped nulling probability is undefined at zero density");
    }
  }
  return p;
}

DerivedConstants derive(const NetworkParams& p) {
  DerivedConstants c;
  c.c_alpha = c_alpha(p.pathloss_exponent);

  const int spare = std::max(0, p.n_antennas - p.n_mues);
  c.nulled_count = snapped_ceil(p.nulling_fraction * spare);
  c.gain_shape = snapped_ceil(spare * (1.0 - p.nulling_fraction));

  const double k = p.n_mues;
  c.delta = p.sc_density * c.c_alpha *
            std::pow(k * p.p_su * p.sir_threshold / p.p_m, 2.0 / p.pathloss_exponent);

  const double count =
      p.nulled_count == NullingCount::degrees_of_freedom ? c.nulled_count : p.n_mues;
  const double cells = p.sc_density * std::numbers::pi * p.macro_radius * p.macro_radius;
  if (count == 0.0) {
    c.nulling_prob_raw = 0.0;
  } else {
    c.nulling_prob_raw = cells > 0.0 ? count / cells : std::numeric_limits<double>::infinity();
  }
  c.nulling_prob = std::clamp(c.nulling_prob_raw, 0.0, 1.0);
  return c;
}

NetworkParams fig1_params() {
  NetworkParams p;
  p.n_antennas = 8;
  p.n_mues = 10;
  p.p_s = 0.1;
  p.p_su = 0.005;
  p.p_mu = 0.005;
  p.p_m = 1.0;
  p.pathloss_exponent = 4.0;
  p.sc_pair_distance = 10.0;
  p.sir_threshold = db_to_linear(5.0);
  p.macro_radius = 250.0;
  p.sc_density = 1e-4;
  p.dl_fraction = 0.5;
  return p;
}

NetworkParams table1_params(int n_mues, int n_antennas, double nulling_fraction) {
  NetworkParams p;
  p.n_mues = n_mues;
  p.n_antennas = n_antennas;
  p.nulling_fraction = nulling_fraction;
  p.pathloss_exponent = 4.0;
  p.p_m = 1.0;
  p.macro_radius = 250.0;
  p.sc_density = 1e-4;
  p.sir_threshold = db_to_linear(5.0);
  p.p_su = 0.1;
  p.p_s = 0.1;
  p.p_mu = 0.005;
  p.sc_pair_distance = 10.0;
  return p;
}

RadialDensity::RadialDensity(Kind kind, double radius) : kind_(kind), radius_(radius) {
  if (!(radius > 0.0)) throw ValidationError("radius", "must be positive");
}

double RadialDensity::upper() const noexcept {
  return kind_ == Kind::disk_pairwise ? 2.0 * radius_ : radius_;
}

double RadialDensity::pdf(double x) const noexcept {
  const double r2 = radius_ * radius_;
  switch (kind_) {
    case Kind::mue_radial:
    case Kind::sc_radial:
      return (x >= 0.0 && x <= radius_) ? 2.0 * x / r2 : 0.0;
    case Kind::disk_pairwise: {
      if (x < 0.0 || x > 2.0 * radius_) return 0.0;
      // Lens-area kernel for two independent uniform points in the disk.
      const double u = x / (2.0 * radius_);
      const double lens = std::acos(u) - u * std::sqrt(std::max(0.0, 1.0 - u * u));
      return (2.0 * x / r2) * (2.0 / std::numbers::pi) * lens;
    }
  }
  return 0.0;
}

}  // namespace hetnet
