#include "hetnet/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coverage_internal.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"
#include "hetnet/xform.hpp"

namespace hetnet {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature: return "quadrature";
    case Method::position_averaged: return "quadrature+position-averaging";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

std::string_view to_string(Tier t) noexcept {
  return t == Tier::macro ? "macro" : "small-cell";
}

std::string_view to_string(Direction d) noexcept {
  return d == Direction::uplink ? "UL" : "DL";
}

namespace detail {

double rate_factor(const NetworkParams& p) { return std::log2(1.0 + p.sir_threshold); }

TailOutcome run_tail(const TailBuilder& build, int n_terms, Precision precision, double radius) {
  TailOutcome out;
  if (precision == Precision::automatic) {
    try {
      const TailSum sum = gamma_tail_sum(build.as_double(), n_terms);
      out.value = sum.value;
      out.error = sum.error_estimate;
      return out;
    } catch (const AccuracyError&) {
      // fall through to the extended path
    }
  }
  try {
    const TailSum sum = gamma_tail_sum(build.as_extended(), n_terms);
    out.value = sum.value;
    out.error = sum.error_estimate;
    out.extended = true;
    return out;
  } catch (const AccuracyError& e) {
    throw AccuracyError(std::string(e.what()) + " (at radius r = " + std::to_string(radius) +
                        " m, extended precision)");
  }
}

}  // namespace detail

namespace {

using detail::rate_factor;

double stable_exponent(const NetworkParams& p) { return 2.0 / p.pathloss_exponent; }

// Exp-stable coefficients of the two small-cell interference processes seen
// at a receiver, as functions of s: exp(-a_dl s^delta) exp(-a_ul s^delta).
struct SmallCellInterference {
  double a_dl = 0.0;
  double a_ul = 0.0;
};

SmallCellInterference small_cell_interference(const NetworkParams& p, double c_alpha) {
  const double delta = stable_exponent(p);
  return {p.sc_density * p.dl_fraction * c_alpha * std::pow(p.p_s, delta),
          p.sc_density * (1.0 - p.dl_fraction) * c_alpha * std::pow(p.p_su, delta)};
}

// Radius of the point where x^alpha / P equals zero for inv-rate purposes.
auto mue_inv_rate(const NetworkParams& p) {
  return [alpha = p.pathloss_exponent, power = p.p_mu](double x) {
    return std::pow(x, alpha) / power;
  };
}

// Uplink MUE coverage with an explicit number of Gamma-tail terms.
CoverageResult uplink_mue_terms(const NetworkParams& p, int n_terms, const EvalOptions& opt) {
  validate(p, LinkContext::uplink);
  const DerivedConstants dc = derive(p);
  const auto sc = small_cell_interference(p, dc.c_alpha);
  const RadialDensity mue_density(RadialDensity::Kind::mue_radial, p.macro_radius);
  const auto inv_rate = mue_inv_rate(p);
  const int order = n_terms - 1;
  const int interferers = p.n_mues - 1;

  double max_tail_error = 0.0;
  bool extended = false;

  auto conditional = [&](double r) {
    const double s = p.sir_threshold * std::pow(r, p.pathloss_exponent) / p.p_mu;
    if (!(s > 0.0)) return 1.0;

    DerivativeArray macro_users = constant_derivatives<double>(s, order);
    if (interferers > 0) {
      macro_users = power(rational_mixture_derivatives(inv_rate, mue_density, s, order),
                          interferers);
    }
    detail::TailBuilder build{
        [&] {
          const DerivativeArray parts[] = {
              exp_stable_derivatives<double>(sc.a_dl, p.pathloss_exponent, s, order),
              exp_stable_derivatives<double>(sc.a_ul, p.pathloss_exponent, s, order),
              macro_users};
          return product_derivatives<double>(parts);
        },
        [&] {
          const ExtendedDerivativeArray parts[] = {
              exp_stable_derivatives<ExtendedReal>(sc.a_dl, p.pathloss_exponent, s, order),
              exp_stable_derivatives<ExtendedReal>(sc.a_ul, p.pathloss_exponent, s, order),
              macro_users.convert<ExtendedReal>()};
          return product_derivatives<ExtendedReal>(parts);
        }};
    const auto tail = detail::run_tail(build, n_terms, opt.precision, r);
    max_tail_error = std::max(max_tail_error, tail.error);
    extended = extended || tail.extended;
    return tail.value;
  };

  const double r2 = p.macro_radius * p.macro_radius;
  const auto quad = integrate([&](double r) { return conditional(r) * 2.0 * r / r2; }, 0.0,
                              p.macro_radius, opt.quadrature);
  if (!quad.converged) {
    throw AccuracyError("uplink_mue_coverage: radial quadrature did not converge");
  }

  CoverageResult out;
  out.value = quad.value;
  out.method = interferers > 0 ? Method::position_averaged : Method::quadrature;
  out.error_estimate = quad.error + max_tail_error;
  out.n_terms = n_terms;
  out.extended_precision = extended;
  out.max_tail_error = max_tail_error;
  return out;
}

// Shared model for the uplink small-cell tier so that sc_ase_ul and the q
// optimizer evaluate bit-identical arithmetic.
class UplinkSmallCell {
 public:
  UplinkSmallCell(const NetworkParams& p, const EvalOptions& opt) : p_(p) {
    validate(p);
    c_alpha_ = derive(p).c_alpha;
    const double d_alpha = std::pow(p.sc_pair_distance, p.pathloss_exponent);
    s_sue_ = p.sir_threshold * d_alpha / p.p_s;
    s_sbs_ = p.sir_threshold * d_alpha / p.p_su;
    std::tie(macro_sue_, err_sue_) = macro_factor(s_sue_, opt);
    std::tie(macro_sbs_, err_sbs_) = macro_factor(s_sbs_, opt);
  }

  double sue(double q) const { return coverage(q, s_sue_, macro_sue_); }
  double sbs(double q) const { return coverage(q, s_sbs_, macro_sbs_); }

  double ase(double q) const {
    return p_.sc_density * (q * sue(q) + (1.0 - q) * sbs(q)) * rate_factor(p_);
  }

  double sue_error() const { return err_sue_; }
  double sbs_error() const { return err_sbs_; }
  Method method() const {
    return p_.n_mues > 0 ? Method::position_averaged : Method::closed_form;
  }

 private:
  // E[(1 + s P_mu D^-alpha)^-1]^K over the receiver-to-MUE distance D.
  std::pair<double, double> macro_factor(double s, const EvalOptions& opt) const {
    if (p_.n_mues == 0) return {1.0, 0.0};
    const RadialDensity pairwise(RadialDensity::Kind::disk_pairwise, p_.macro_radius);
    double mean = 0.0;
    double err = 0.0;
    if (opt.positions == PositionAveraging::quadrature) {
      const auto inv_rate = mue_inv_rate(p_);
      const QuadratureOptions tight{1e-13, 1e-11, 4000};
      mean = rational_mixture_value(inv_rate, pairwise, s, tight);
      err = 1e-12;
      const double factor = std::pow(mean, p_.n_mues);
      return {factor, p_.n_mues * err};
    }
    // Sampled placements: receiver and K users uniform in the disk.
    double sum = 0.0;
    for (std::uint64_t i = 0; i < opt.position_samples; ++i) {
      RandomStream rng(opt.position_seed, i, StreamId::positions);
      const double rr = p_.macro_radius * std::sqrt(rng.uniform());
      const double ra = 2.0 * std::numbers::pi * rng.uniform();
      double prod = 1.0;
      for (int k = 0; k < p_.n_mues; ++k) {
        const double mr = p_.macro_radius * std::sqrt(rng.uniform());
        const double ma = 2.0 * std::numbers::pi * rng.uniform();
        const double dx = rr * std::cos(ra) - mr * std::cos(ma);
        const double dy = rr * std::sin(ra) - mr * std::sin(ma);
        const double dist_alpha = std::pow(dx * dx + dy * dy, 0.5 * p_.pathloss_exponent);
        prod *= dist_alpha / (dist_alpha + s * p_.p_mu);
      }
      sum += prod;
    }
    mean = sum / static_cast<double>(opt.position_samples);
    err = 3.0 / std::sqrt(static_cast<double>(opt.position_samples));
    return {mean, err};
  }

  double coverage(double q, double s, double macro) const {
    const double delta = stable_exponent(p_);
    const double exponent =
        p_.sc_density * q * std::pow(p_.p_s * s, delta) * c_alpha_ +
        p_.sc_density * (1.0 - q) * std::pow(p_.p_su * s, delta) * c_alpha_;
    return std::exp(-exponent) * macro;
  }

  NetworkParams p_;
  double c_alpha_ = 0.0;
  double s_sue_ = 0.0;
  double s_sbs_ = 0.0;
  double macro_sue_ = 1.0;
  double macro_sbs_ = 1.0;
  double err_sue_ = 0.0;
  double err_sbs_ = 0.0;
};

CoverageResult sc_result(double value, double error, Method method) {
  CoverageResult out;
  out.value = value;
  out.error_estimate = error;
  out.method = method;
  out.n_terms = 1;
  return out;
}

}  // namespace

CoverageResult uplink_mue_coverage(const NetworkParams& params, const EvalOptions& options) {
  return uplink_mue_terms(params, params.n_antennas, options);
}

CoverageBound uplink_mue_coverage_bound(const NetworkParams& p, const BoundOptions& options) {
  validate(p, LinkContext::uplink);
  const DerivedConstants dc = derive(p);
  const auto sc = small_cell_interference(p, dc.c_alpha);
  const RadialDensity mue_density(RadialDensity::Kind::mue_radial, p.macro_radius);
  const auto inv_rate = mue_inv_rate(p);
  const int n_terms = p.n_antennas;
  const int interferers = p.n_mues - 1;
  const double delta = stable_exponent(p);

  auto laplace = [&](double s) {
    double value = std::exp(-(sc.a_dl + sc.a_ul) * std::pow(s, delta));
    if (interferers > 0) {
      value *= std::pow(rational_mixture_value(inv_rate, mue_density, s), interferers);
    }
    return value;
  };

  // Below this radius some shifted argument s - n/e is negative.
  const double min_s = gamma_tail_bound_min_s(n_terms);
  const double trivial_below =
      std::min(p.macro_radius,
               std::pow(min_s * p.p_mu / p.sir_threshold, 1.0 / p.pathloss_exponent));
  if (options.strict && trivial_below > 0.0) {
    // Surfaces the DomainError naming the offending term.
    gamma_tail_bound(laplace, 0.5 * min_s, n_terms);
  }

  const double r2 = p.macro_radius * p.macro_radius;
  auto conditional = [&](double r) {
    const double s = p.sir_threshold * std::pow(r, p.pathloss_exponent) / p.p_mu;
    return std::min(1.0, gamma_tail_bound(laplace, std::max(s, min_s), n_terms));
  };
  const auto quad = integrate([&](double r) { return conditional(r) * 2.0 * r / r2; },
                              trivial_below, p.macro_radius, options.quadrature);
  if (!quad.converged) {
    throw AccuracyError("uplink_mue_coverage_bound: radial quadrature did not converge");
  }

  CoverageBound out;
  out.value = quad.value + (trivial_below * trivial_below) / r2;
  out.error_estimate = quad.error;
  out.trivial_below = trivial_below;
  return out;
}

AseResult macro_ase_ul(const NetworkParams& params, const EvalOptions& options) {
  AseResult out;
  out.tier = Tier::macro;
  out.direction = Direction::uplink;
  out.coverage.push_back(uplink_mue_coverage(params, options));
  out.value = params.n_mues * out.coverage.front().value * rate_factor(params);
  return out;
}

AseResult macro_ase_ul_uncorrelated(const NetworkParams& params, const EvalOptions& options) {
  AseResult out;
  out.tier = Tier::macro;
  out.direction = Direction::uplink;
  out.coverage.push_back(uplink_mue_terms(params, 1, options));
  out.value = params.n_mues * out.coverage.front().value;
  return out;
}

CoverageResult sue_coverage_ul(const NetworkParams& params, const EvalOptions& options) {
  const UplinkSmallCell model(params, options);
  return sc_result(model.sue(params.dl_fraction), model.sue_error(), model.method());
}

CoverageResult sbs_coverage_ul(const NetworkParams& params, const EvalOptions& options) {
  const UplinkSmallCell model(params, options);
  return sc_result(model.sbs(params.dl_fraction), model.sbs_error(), model.method());
}

AseResult sc_ase_ul(const NetworkParams& params, const EvalOptions& options) {
  const UplinkSmallCell model(params, options);
  const double q = params.dl_fraction;
  AseResult out;
  out.tier = Tier::small_cell;
  out.direction = Direction::uplink;
  out.coverage.push_back(sc_result(model.sue(q), model.sue_error(), model.method()));
  out.coverage.push_back(sc_result(model.sbs(q), model.sbs_error(), model.method()));
  out.value = model.ase(q);
  return out;
}

QOptimum optimal_q(const NetworkParams& params, double density, const EvalOptions& options) {
  if (!(density > 0.0)) throw ValidationError("sc_density", "optimal q needs a positive density");
  NetworkParams p = params;
  p.sc_density = density;
  const UplinkSmallCell model(p, options);
  return detail::maximize_on_unit_interval([&](double q) { return model.ase(q); });
}

CoverageResult dl_mue_coverage(const NetworkParams& p, const EvalOptions& opt) {
  validate(p, LinkContext::downlink);
  const DerivedConstants dc = derive(p);
  const double a = p.sc_density * dc.c_alpha * std::pow(p.p_su, stable_exponent(p));
  const int n_terms = dc.gain_shape + 1;
  const int order = dc.gain_shape;
  const double k = p.n_mues;

  double max_tail_error = 0.0;
  bool extended = false;
  auto conditional = [&](double r) {
    const double s = p.sir_threshold * std::pow(r, p.pathloss_exponent) * k / p.p_m;
    if (!(s > 0.0)) return 1.0;
    detail::TailBuilder build{
        [&] { return exp_stable_derivatives<double>(a, p.pathloss_exponent, s, order); },
        [&] { return exp_stable_derivatives<ExtendedReal>(a, p.pathloss_exponent, s, order); }};
    const auto tail = detail::run_tail(build, n_terms, opt.precision, r);
    max_tail_error = std::max(max_tail_error, tail.error);
    extended = extended || tail.extended;
    return tail.value;
  };

  const double r2 = p.macro_radius * p.macro_radius;
  const auto quad = integrate([&](double r) { return conditional(r) * 2.0 * r / r2; }, 0.0,
                              p.macro_radius, opt.quadrature);
  if (!quad.converged) {
    throw AccuracyError("dl_mue_coverage: radial quadrature did not converge");
  }
  CoverageResult out;
  out.value = quad.value;
  out.method = Method::quadrature;
  out.error_estimate = quad.error + max_tail_error;
  out.n_terms = n_terms;
  out.extended_precision = extended;
  out.max_tail_error = max_tail_error;
  return out;
}

CoverageResult dl_mue_coverage_closed_form(const NetworkParams& p) {
  validate(p, LinkContext::downlink);
  const DerivedConstants dc = derive(p);
  const double x = dc.delta * p.macro_radius * p.macro_radius;
  CoverageResult out;
  out.method = Method::closed_form;
  out.n_terms = 1;
  out.value = x < 1e-12 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
  out.error_estimate = 4.0 * std::numeric_limits<double>::epsilon();
  return out;
}

AseResult macro_ase_dl(const NetworkParams& params, const EvalOptions& options) {
  AseResult out;
  out.tier = Tier::macro;
  out.direction = Direction::downlink;
  out.coverage.push_back(dl_mue_coverage(params, options));
  out.value = params.n_mues * out.coverage.front().value * rate_factor(params);
  return out;
}

double dl_sbs_coverage_nulled(const NetworkParams& p) {
  const double c = c_alpha(p.pathloss_exponent);
  return std::exp(-p.sc_density * std::pow(p.sir_threshold, stable_exponent(p)) *
                  p.sc_pair_distance * p.sc_pair_distance * c);
}

double dl_sbs_coverage_not_nulled(const NetworkParams& p, double distance) {
  const double macro = p.p_m * p.sir_threshold *
                       std::pow(p.sc_pair_distance, p.pathloss_exponent) /
                       (p.n_mues * p.p_su);
  const double d_alpha = std::pow(distance, p.pathloss_exponent);
  // (1 + macro D^-alpha / K ... )^-K written to stay finite as D -> 0.
  const double ratio = std::isinf(d_alpha) ? 1.0 : d_alpha / (d_alpha + macro);
  return dl_sbs_coverage_nulled(p) * std::pow(ratio, p.n_mues);
}

CoverageResult dl_sbs_coverage(const NetworkParams& p, const EvalOptions& opt) {
  validate(p, LinkContext::downlink);
  const DerivedConstants dc = derive(p);
  const double nulling = dc.effective_nulling_prob(p.clamp_nulling_prob);
  const double nulled = dl_sbs_coverage_nulled(p);

  const RadialDensity sc_density(RadialDensity::Kind::sc_radial, p.macro_radius);
  QuadratureOptions tight = opt.quadrature;
  tight.abs_tol = std::min(tight.abs_tol, 1e-10);
  const auto quad = integrate(
      [&](double d) { return dl_sbs_coverage_not_nulled(p, d) * sc_density.pdf(d); }, 0.0,
      p.macro_radius, tight);
  if (!quad.converged) {
    throw AccuracyError("dl_sbs_coverage: distance quadrature did not converge");
  }

  CoverageResult out;
  out.value = nulling * nulled + (1.0 - nulling) * quad.value;
  out.error_estimate = std::abs(1.0 - nulling) * quad.error;
  out.method = Method::position_averaged;
  out.n_terms = 1;
  return out;
}

AseResult sc_ase_dl(const NetworkParams& params, const EvalOptions& options) {
  AseResult out;
  out.tier = Tier::small_cell;
  out.direction = Direction::downlink;
  out.coverage.push_back(dl_sbs_coverage(params, options));
  out.value = params.sc_density * out.coverage.front().value * rate_factor(params);
  return out;
}

}  // namespace hetnet
