#include "hetnet/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {

McEstimate wilson_interval(std::uint64_t hits, std::uint64_t n, std::uint64_t seed, double z) {
  McEstimate e;
  e.n_drops = n;
  e.seed = seed;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  e.mean = p;
  e.half_width = half;
  e.lower = std::max(0.0, center - half);
  e.upper = std::min(1.0, center + half);
  return e;
}

McEstimate t_interval(double sum, double sum_sq, std::uint64_t n, std::uint64_t seed) {
  McEstimate e;
  e.n_drops = n;
  e.seed = seed;
  if (n == 0) return e;
  const double nn = static_cast<double>(n);
  e.mean = sum / nn;
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - nn * e.mean * e.mean) / (nn - 1.0));
    const boost::math::students_t dist(nn - 1.0);
    const double t = boost::math::quantile(dist, 0.995);
    e.half_width = t * std::sqrt(var / nn);
  }
  e.lower = e.mean - e.half_width;
  e.upper = e.mean + e.half_width;
  return e;
}

McEstimate scaled(const McEstimate& e, double factor) {
  McEstimate out = e;
  out.mean *= factor;
  out.half_width *= factor;
  out.lower *= factor;
  out.upper *= factor;
  return out;
}

std::vector<PolarPoint> sample_ppp_annulus(double density, double inner, double outer,
                                           RandomStream& rng) {
  std::vector<PolarPoint> points;
  if (!(density > 0.0) || !(outer > inner)) return points;
  const double in2 = inner * inner;
  const double area2 = outer * outer - in2;
  const std::uint64_t count = rng.poisson(density * std::numbers::pi * area2);
  points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double radius = std::sqrt(in2 + rng.uniform() * area2);
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    points.push_back({radius, angle});
  }
  return points;
}

std::vector<PolarPoint> sample_ppp_disk(double density, double radius, RandomStream& rng) {
  return sample_ppp_annulus(density, 0.0, radius, rng);
}

namespace {

constexpr std::uint64_t kBlockDrops = 1000;

// distance^-alpha from a squared distance.
inline double path_gain(double dist2, double alpha) {
  if (alpha == 4.0) return 1.0 / (dist2 * dist2);
  return std::pow(dist2, -0.5 * alpha);
}

// Visits every point of a PPP truncated at `sim_radius` and centered on the
// receiver. Ring j (width `ring_width`) draws its count, radii and any
// per-point marks from its own substream, so enlarging the truncation radius
// leaves the inner rings untouched. `done()` is polled after each ring; once
// it holds, the outer rings cannot change the caller's outcome and are
// skipped.
template <typename Visit, typename Done>
void for_each_ring_point(std::uint64_t seed, std::uint64_t drop, std::uint32_t process,
                         double density, double ring_width, double sim_radius, Visit&& visit,
                         Done&& done) {
  if (!(density > 0.0)) return;
  const auto rings = static_cast<std::uint32_t>(std::ceil(sim_radius / ring_width - 1e-12));
  for (std::uint32_t j = 0; j < rings; ++j) {
    const double inner = j * ring_width;
    const double outer = std::min(sim_radius, (j + 1) * ring_width);
    if (!(outer > inner)) break;
    RandomStream rng(seed, drop, ring_stream(process, j));
    const double in2 = inner * inner;
    const double area2 = outer * outer - in2;
    const std::uint64_t count = rng.poisson(density * std::numbers::pi * area2);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double dist2 = in2 + rng.uniform() * area2;
      visit(dist2, rng);
    }
    if (done()) return;
  }
}

template <typename Visit>
void for_each_ring_point(std::uint64_t seed, std::uint64_t drop, std::uint32_t process,
                         double density, double ring_width, double sim_radius, Visit&& visit) {
  for_each_ring_point(seed, drop, process, density, ring_width, sim_radius,
                      std::forward<Visit>(visit), [] { return false; });
}

template <typename Covered>
McEstimate run_coverage(const DropConfig& cfg, Covered&& covered) {
  if (cfg.n_drops == 0) throw ValidationError("n_drops", "must be at least 1");
  if (cfg.effective_sim_radius() < cfg.params.macro_radius) {
    throw ValidationError("sim_radius", "must be at least the macro radius");
  }
  const std::uint64_t blocks = (cfg.n_drops + kBlockDrops - 1) / kBlockDrops;
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, worker_count(cfg.threads), [&](std::size_t b) {
    const std::uint64_t first = b * kBlockDrops;
    const std::uint64_t last = std::min(cfg.n_drops, first + kBlockDrops);
    std::uint64_t local = 0;
    for (std::uint64_t drop = first; drop < last; ++drop) local += covered(drop) ? 1 : 0;
    hits[b] = local;
  });
  std::uint64_t total = 0;
  for (const auto h : hits) total += h;
  return wilson_interval(total, cfg.n_drops, cfg.seed);
}

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

CVector complex_gaussian_vector(int n, RandomStream& rng) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

CMatrix complex_gaussian_matrix(int rows, int cols, RandomStream& rng) {
  CMatrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.complex_normal();
  }
  return m;
}

void require_zf_dimensions(int n_antennas, int n_users, int nulled) {
  if (n_users < 1 || nulled < 0 || n_users + nulled > n_antennas) {
    throw ValidationError("n_antennas",
                          "channel-level zero-forcing needs K + nulled <= N (got K = " +
                              std::to_string(n_users) + ", nulled = " + std::to_string(nulled) +
                              ", N = " + std::to_string(n_antennas) + ")");
  }
}

int nulled_channel_count(const NetworkParams& p, const DerivedConstants& dc) {
  return p.nulled_count == NullingCount::degrees_of_freedom ? dc.nulled_count : p.n_mues;
}

}  // namespace

MrcGains sample_mrc_gains(int n_antennas, int n_users, RandomStream& rng) {
  MrcGains g;
  const CVector h = complex_gaussian_vector(n_antennas, rng);
  g.desired = h.squaredNorm();
  const CVector v = h / std::sqrt(g.desired);
  g.cross.reserve(static_cast<std::size_t>(std::max(0, n_users - 1)));
  for (int m = 1; m < n_users; ++m) {
    const CVector hm = complex_gaussian_vector(n_antennas, rng);
    g.cross.push_back(std::norm(hm.dot(v)));
  }
  return g;
}

double sample_zf_desired_gain(int n_antennas, int n_users, int nulled, RandomStream& rng) {
  require_zf_dimensions(n_antennas, n_users, nulled);
  const CMatrix h = complex_gaussian_matrix(n_antennas, n_users + nulled, rng);
  const CMatrix gram = h.adjoint() * h;
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n_users + nulled);
  e0(0) = 1.0;
  const Eigen::VectorXcd x = gram.llt().solve(e0);
  return 1.0 / x(0).real();
}

double sample_zf_leakage(int n_antennas, int n_users, int nulled, RandomStream& rng) {
  require_zf_dimensions(n_antennas, n_users, nulled);
  const CMatrix h = complex_gaussian_matrix(n_antennas, n_users + nulled, rng);
  const CVector f = complex_gaussian_vector(n_antennas, rng);
  const CMatrix gram = h.adjoint() * h;
  const CMatrix beams = h * gram.llt().solve(CMatrix::Identity(n_users + nulled, n_users + nulled));
  double leakage = 0.0;
  for (int k = 0; k < n_users; ++k) {
    const CVector w = beams.col(k).normalized();
    leakage += std::norm(w.dot(f));
  }
  return leakage;
}

namespace {

// Macro users and their gains at the macro BS; shared by the drop
// realization and the estimator so both consume identical streams.
void draw_macro_users(const DropConfig& cfg, std::uint64_t drop, DropRealization& out) {
  const NetworkParams& p = cfg.params;
  RandomStream placement(cfg.seed, drop, StreamId::placement);
  out.mues.reserve(static_cast<std::size_t>(p.n_mues));
  for (int k = 0; k < p.n_mues; ++k) {
    const double radius = p.macro_radius * std::sqrt(placement.uniform());
    const double angle = 2.0 * std::numbers::pi * placement.uniform();
    out.mues.push_back({radius, angle});
  }
  if (cfg.fidelity == Fidelity::channel) {
    RandomStream channel(cfg.seed, drop, StreamId::channel);
    MrcGains g = sample_mrc_gains(p.n_antennas, p.n_mues, channel);
    out.desired_gain = g.desired;
    out.mue_gains = std::move(g.cross);
  } else {
    RandomStream fading(cfg.seed, drop, StreamId::fading);
    out.desired_gain = fading.gamma(p.n_antennas);
    for (int m = 1; m < p.n_mues; ++m) out.mue_gains.push_back(fading.exponential());
  }
}

}  // namespace

DropRealization realize_uplink_drop(const DropConfig& cfg, std::uint64_t drop) {
  const NetworkParams& p = cfg.params;
  DropRealization out;
  draw_macro_users(cfg, drop, out);
  for_each_ring_point(cfg.seed, drop, 0, p.sc_density, p.macro_radius,
                      cfg.effective_sim_radius(), [&](double dist2, RandomStream& rng) {
                        const bool downlink = rng.bernoulli(p.dl_fraction);
                        out.small_cells.push_back({std::sqrt(dist2), downlink, rng.exponential()});
                      });
  return out;
}

McEstimate estimate_uplink_mue_coverage(const DropConfig& cfg) {
  validate(cfg.params, LinkContext::uplink);
  if (cfg.n_drops < 100) throw ValidationError("n_drops", "need at least 100 drops");
  const NetworkParams& p = cfg.params;
  const double alpha = p.pathloss_exponent;
  return run_coverage(cfg, [&](std::uint64_t drop) {
    DropRealization d;
    draw_macro_users(cfg, drop, d);
    const double r0 = d.mues.front().radius;
    const double limit = p.p_mu * d.desired_gain * path_gain(r0 * r0, alpha) / p.sir_threshold;
    double interference = 0.0;
    for (std::size_t m = 1; m < d.mues.size(); ++m) {
      const double rm = d.mues[m].radius;
      interference += p.p_mu * d.mue_gains[m - 1] * path_gain(rm * rm, alpha);
    }
    for_each_ring_point(
        cfg.seed, drop, 0, p.sc_density, p.macro_radius, cfg.effective_sim_radius(),
        [&](double dist2, RandomStream& rng) {
          const double power = rng.bernoulli(p.dl_fraction) ? p.p_s : p.p_su;
          interference += power * rng.exponential() * path_gain(dist2, alpha);
        },
        [&] { return interference >= limit; });
    return interference < limit;
  });
}

namespace {

// Small-cell receiver uniform in the macro disk; its own transmitter (power
// `desired_power`) at distance d; interferers are the marked small-cell
// process around it plus all K macro users.
McEstimate estimate_sc_ul(const DropConfig& cfg, double desired_power) {
  validate(cfg.params);
  const NetworkParams& p = cfg.params;
  const double alpha = p.pathloss_exponent;
  const double d_gain = path_gain(p.sc_pair_distance * p.sc_pair_distance, alpha);
  return run_coverage(cfg, [&](std::uint64_t drop) {
    RandomStream placement(cfg.seed, drop, StreamId::placement);
    RandomStream fading(cfg.seed, drop, StreamId::fading);
    const double rx_radius = p.macro_radius * std::sqrt(placement.uniform());
    const double rx_angle = 2.0 * std::numbers::pi * placement.uniform();
    const double rx_x = rx_radius * std::cos(rx_angle);
    const double rx_y = rx_radius * std::sin(rx_angle);

    const double desired = desired_power * fading.exponential() * d_gain;
    double interference = 0.0;
    for (int k = 0; k < p.n_mues; ++k) {
      const double radius = p.macro_radius * std::sqrt(placement.uniform());
      const double angle = 2.0 * std::numbers::pi * placement.uniform();
      const double dx = radius * std::cos(angle) - rx_x;
      const double dy = radius * std::sin(angle) - rx_y;
      interference += p.p_mu * fading.exponential() * path_gain(dx * dx + dy * dy, alpha);
    }
    const double limit = desired / p.sir_threshold;
    for_each_ring_point(
        cfg.seed, drop, 0, p.sc_density, p.macro_radius, cfg.effective_sim_radius(),
        [&](double dist2, RandomStream& rng) {
          const double power = rng.bernoulli(p.dl_fraction) ? p.p_s : p.p_su;
          interference += power * rng.exponential() * path_gain(dist2, alpha);
        },
        [&] { return interference >= limit; });
    return interference < limit;
  });
}

}  // namespace

McEstimate estimate_sue_coverage_ul(const DropConfig& cfg) {
  return estimate_sc_ul(cfg, cfg.params.p_s);
}

McEstimate estimate_sbs_coverage_ul(const DropConfig& cfg) {
  return estimate_sc_ul(cfg, cfg.params.p_su);
}

DownlinkEstimates estimate_dl_coverage(const DropConfig& cfg) {
  validate(cfg.params, LinkContext::downlink);
  if (cfg.n_drops < 100) throw ValidationError("n_drops", "need at least 100 drops");
  const NetworkParams& p = cfg.params;
  const DerivedConstants dc = derive(p);
  const int nulled = nulled_channel_count(p, dc);
  if (cfg.fidelity == Fidelity::channel) require_zf_dimensions(p.n_antennas, p.n_mues, nulled);

  const double alpha = p.pathloss_exponent;
  const double k = p.n_mues;
  const double beam_power = p.p_m / k;
  const double d_gain = path_gain(p.sc_pair_distance * p.sc_pair_distance, alpha);
  const double sim_radius = cfg.effective_sim_radius();

  // Covered iff the small-cell uplink users add less than `limit` to `interference`.
  auto below_limit = [&](std::uint64_t drop, std::uint32_t process, double interference,
                         double limit) {
    for_each_ring_point(
        cfg.seed, drop, process, p.sc_density, p.macro_radius, sim_radius,
        [&](double dist2, RandomStream& rng) {
          interference += p.p_su * rng.exponential() * path_gain(dist2, alpha);
        },
        [&] { return interference >= limit; });
    return interference < limit;
  };

  DownlinkEstimates out;
  out.mue = run_coverage(cfg, [&](std::uint64_t drop) {
    RandomStream placement(cfg.seed, drop, StreamId::placement);
    const double r = p.macro_radius * std::sqrt(placement.uniform());
    double gain = 0.0;
    if (cfg.fidelity == Fidelity::channel) {
      RandomStream channel(cfg.seed, drop, StreamId::channel);
      gain = sample_zf_desired_gain(p.n_antennas, p.n_mues, nulled, channel);
    } else {
      RandomStream fading(cfg.seed, drop, StreamId::fading);
      gain = fading.gamma(dc.gain_shape + 1.0);
    }
    const double desired = beam_power * gain * path_gain(r * r, alpha);
    return below_limit(drop, 0, 0.0, desired / p.sir_threshold);
  });

  out.sbs = run_coverage(cfg, [&](std::uint64_t drop) {
    RandomStream events(cfg.seed, drop, StreamId::events);
    RandomStream fading(cfg.seed, drop, StreamId::marks);
    const double distance = p.macro_radius * std::sqrt(events.uniform());
    const bool is_nulled = events.bernoulli(dc.nulling_prob);
    const double desired = p.p_su * fading.exponential() * d_gain;
    double interference = 0.0;
    if (!is_nulled) {
      double leakage = 0.0;
      if (cfg.fidelity == Fidelity::channel) {
        RandomStream channel(cfg.seed, drop, StreamId::aux_channel);
        leakage = sample_zf_leakage(p.n_antennas, p.n_mues, nulled, channel);
      } else {
        leakage = fading.gamma(k);
      }
      interference += beam_power * leakage * path_gain(distance * distance, alpha);
    }
    return below_limit(drop, 1, interference, desired / p.sir_threshold);
  });
  return out;
}

McEstimate empirical_laplace(const PppSpec& ppp, double power, double s, std::uint64_t n_samples,
                             std::uint64_t seed, unsigned threads) {
  if (!(s >= 0.0)) throw DomainError("empirical_laplace: s must be nonnegative");
  if (n_samples == 0) throw ValidationError("n_samples", "must be at least 1");
  const std::uint64_t blocks = (n_samples + kBlockDrops - 1) / kBlockDrops;
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> sums_sq(blocks, 0.0);
  parallel_for(blocks, worker_count(threads), [&](std::size_t b) {
    const std::uint64_t first = b * kBlockDrops;
    const std::uint64_t last = std::min(n_samples, first + kBlockDrops);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t i = first; i < last; ++i) {
      double interference = 0.0;
      for_each_ring_point(seed, i, 0, ppp.density, ppp.radius, ppp.radius,
                          [&](double dist2, RandomStream& rng) {
                            interference += power * rng.exponential() *
                                            path_gain(dist2, ppp.pathloss_exponent);
                          });
      const double value = std::exp(-s * interference);
      sum += value;
      sum_sq += value * value;
    }
    sums[b] = sum;
    sums_sq[b] = sum_sq;
  });
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    sum += sums[b];
    sum_sq += sums_sq[b];
  }
  return t_interval(sum, sum_sq, n_samples, seed);
}

}  // namespace hetnet
