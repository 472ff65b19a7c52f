#include <cmath>

#include "hetnet/coverage.hpp"
#include "hetsim/app.hpp"

namespace hetsim {

using hetnet::NetworkParams;

namespace {

NetworkParams uplink_base() {
  NetworkParams p = hetnet::fig1_params();
  p.macro_radius = 100.0;
  return p;
}

NetworkParams uplink_case(int n, int k, double q) {
  NetworkParams p = uplink_base();
  p.n_antennas = n;
  p.n_mues = k;
  p.dl_fraction = q;
  return p;
}

NetworkParams downlink_case(int k, int n, double beta) {
  NetworkParams p = hetnet::table1_params(k, n, beta);
  return p;
}

}  // namespace

std::vector<ValidationCase> standard_validation_grid() {
  using L = ValidationLink;
  NetworkParams fig1_n8 = hetnet::fig1_params();
  fig1_n8.n_mues = 4;

  return {
      {"ul-mue-n1-k1-q0", L::uplink_mue, uplink_case(1, 1, 0.0)},
      {"ul-mue-n1-k4-q0.5", L::uplink_mue, uplink_case(1, 4, 0.5)},
      {"ul-mue-n8-k4-q0.5-rm250", L::uplink_mue, fig1_n8},
      {"ul-mue-n8-k10-q1", L::uplink_mue, uplink_case(8, 10, 1.0)},
      {"ul-mue-n32-k10-q0.5", L::uplink_mue, uplink_case(32, 10, 0.5)},
      {"ul-mue-n32-k1-q1", L::uplink_mue, uplink_case(32, 1, 1.0)},
      {"ul-sue-k1-q1", L::uplink_sue, uplink_case(8, 1, 1.0)},
      {"ul-sue-k4-q0.5", L::uplink_sue, uplink_case(8, 4, 0.5)},
      {"ul-sbs-k4-q0.5", L::uplink_sbs, uplink_case(8, 4, 0.5)},
      {"ul-sbs-k10-q0", L::uplink_sbs, uplink_case(8, 10, 0.0)},
      {"dl-k4-n32-b0", L::downlink, downlink_case(4, 32, 0.0)},
      {"dl-k4-n32-b0.5", L::downlink, downlink_case(4, 32, 0.5)},
      {"dl-k10-n100-b1", L::downlink, downlink_case(10, 100, 1.0)},
  };
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t index) noexcept {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

Record validation_record(const ValidationCase& c, std::string_view quantity, hetnet::Tier tier,
                         hetnet::Direction direction, const hetnet::CoverageResult& analytic,
                         const hetnet::McEstimate& mc, hetnet::Fidelity fidelity) {
  const NetworkParams& p = c.params;
  Record r;
  r.add("case", c.name)
      .add("quantity", quantity)
      .add("tier", to_string(tier))
      .add("direction", to_string(direction))
      .add("n_antennas", p.n_antennas)
      .add("n_mues", p.n_mues)
      .add("sc_density", p.sc_density)
      .add("dl_fraction", p.dl_fraction)
      .add("nulling_fraction", p.nulling_fraction)
      .add("macro_radius", p.macro_radius)
      .add("p_su", p.p_su)
      .add("analytic", analytic.value)
      .add("analytic_method", to_string(analytic.method))
      .add("analytic_error", analytic.error_estimate)
      .add("mc_coverage", mc.mean)
      .add("mc_lower", mc.lower)
      .add("mc_upper", mc.upper)
      .add("mc_half_width", mc.half_width)
      .add("mc_drops", mc.n_drops)
      .add("seed", mc.seed)
      .add("fidelity", fidelity == hetnet::Fidelity::channel ? "channel" : "distribution")
      .add("inside_ci", mc.contains(analytic.value));
  return r;
}

}  // namespace

std::vector<Record> run_validation(const std::vector<ValidationCase>& cases, std::uint64_t drops,
                                   std::uint64_t seed, hetnet::Fidelity fidelity, unsigned threads,
                                   double sim_radius) {
  using hetnet::Direction;
  using hetnet::Tier;
  std::vector<Record> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const ValidationCase& c = cases[i];
    hetnet::DropConfig cfg;
    cfg.params = c.params;
    cfg.n_drops = drops;
    cfg.seed = case_seed(seed, i);
    cfg.fidelity = fidelity;
    cfg.threads = threads;
    cfg.sim_radius = sim_radius;
    switch (c.link) {
      case ValidationLink::uplink_mue:
        out.push_back(validation_record(c, "mue_ul", Tier::macro, Direction::uplink,
                                        hetnet::uplink_mue_coverage(c.params),
                                        hetnet::estimate_uplink_mue_coverage(cfg), fidelity));
        break;
      case ValidationLink::uplink_sue:
        out.push_back(validation_record(c, "sue_ul", Tier::small_cell, Direction::uplink,
                                        hetnet::sue_coverage_ul(c.params),
                                        hetnet::estimate_sue_coverage_ul(cfg), fidelity));
        break;
      case ValidationLink::uplink_sbs:
        out.push_back(validation_record(c, "sbs_ul", Tier::small_cell, Direction::uplink,
                                        hetnet::sbs_coverage_ul(c.params),
                                        hetnet::estimate_sbs_coverage_ul(cfg), fidelity));
        break;
      case ValidationLink::downlink: {
        const hetnet::DownlinkEstimates mc = hetnet::estimate_dl_coverage(cfg);
        out.push_back(validation_record(c, "mue_dl", Tier::macro, Direction::downlink,
                                        hetnet::dl_mue_coverage(c.params), mc.mue, fidelity));
        out.push_back(validation_record(c, "sbs_dl", Tier::small_cell, Direction::downlink,
                                        hetnet::dl_sbs_coverage(c.params), mc.sbs, fidelity));
        break;
      }
    }
  }
  return out;
}

}  // namespace hetsim
