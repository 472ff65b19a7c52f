#include "hetsim/app.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "hetnet/coverage.hpp"
#include "hetnet/errors.hpp"

namespace hetsim {

using hetnet::NetworkParams;

std::vector<double> sweep_values(const SweepSpec& spec) {
  if (spec.points < 2) throw hetnet::ValidationError("points", "a sweep needs at least 2 points");
  if (!std::isfinite(spec.from) || !std::isfinite(spec.to)) {
    throw hetnet::ValidationError("from", "sweep bounds must be finite");
  }
  if (spec.scale == SweepScale::log && !(spec.from > 0.0 && spec.to > 0.0)) {
    throw hetnet::ValidationError("from", "log sweeps need positive bounds");
  }
  const bool integral = spec.parameter == "n_antennas" || spec.parameter == "n_mues";
  std::vector<double> out;
  for (int i = 0; i < spec.points; ++i) {
    const double t = static_cast<double>(i) / (spec.points - 1);
    double v = spec.scale == SweepScale::log
                   ? std::pow(10.0, std::log10(spec.from) +
                                        t * (std::log10(spec.to) - std::log10(spec.from)))
                   : spec.from + t * (spec.to - spec.from);
    if (i == 0) v = spec.from;
    if (i == spec.points - 1) v = spec.to;
    if (integral) v = std::round(v);
    if (integral && !out.empty() && out.back() == v) continue;
    out.push_back(v);
  }
  return out;
}

NetworkParams with_parameter(const NetworkParams& base, const std::string& key, double value) {
  if (key.empty()) return base;
  return hetnet::parse_config(key + " = " + format_double(value), base);
}

namespace {

struct ParamFlags {
  std::string preset = "default";
  std::string config;
  std::optional<int> n, k;
  std::optional<double> lambda, q, alpha, d, rm, t_db, p_m, p_mu, p_s, p_su, beta;
  bool unclamped = false;
  std::string nulling_count = "m";
};

struct SweepFlags {
  std::string parameter;
  std::optional<double> from, to;
  int points = 11;
  std::string scale = "linear";
};

struct McFlags {
  bool validate = false;
  std::uint64_t drops = 200000;
  std::optional<std::uint64_t> seed;
  std::string fidelity = "distribution";
  double sim_radius = 0.0;
  unsigned threads = 0;
};

struct OutputFlags {
  std::string format = "csv";
  std::string output;
  bool timing = false;
};

void add_param_flags(CLI::App* app, ParamFlags& f) {
  app->add_option("--preset", f.preset, "Base parameter set")
      ->check(CLI::IsMember({"default", "fig1", "table1"}));
  app->add_option("--config", f.config, "Flat key = value parameter file")->check(CLI::ExistingFile);
  app->add_option("--n", f.n, "Macro BS antennas N");
  app->add_option("--k", f.k, "Served macro users K");
  app->add_option("--lambda", f.lambda, "Small-cell density (per m^2)");
  app->add_option("--q", f.q, "Probability a small cell is in downlink");
  app->add_option("--alpha", f.alpha, "Pathloss exponent");
  app->add_option("--d", f.d, "SBS-SUE distance (m)");
  app->add_option("--rm", f.rm, "Macro cell radius (m)");
  app->add_option("--t-db", f.t_db, "SIR threshold (dB)");
  app->add_option("--p-m", f.p_m, "Macro BS power (W)");
  app->add_option("--p-mu", f.p_mu, "Macro user power (W)");
  app->add_option("--p-s", f.p_s, "Small-cell BS power (W)");
  app->add_option("--p-su", f.p_su, "Small-cell user power (W)");
  app->add_option("--beta", f.beta, "Fraction of spare antennas used for nulling");
  app->add_flag("--unclamped", f.unclamped, "Use the raw nulling probability, which may exceed 1");
  app->add_option("--nulling-count", f.nulling_count, "Nulled small cells: m = ceil(beta (N-K)), k = K")
      ->check(CLI::IsMember({"m", "k"}));
}

void add_sweep_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--sweep", f.parameter, "Parameter to sweep (configuration key)");
  app->add_option("--from", f.from, "Sweep start");
  app->add_option("--to", f.to, "Sweep end");
  app->add_option("--points", f.points, "Sweep points")->check(CLI::Range(2, 100000));
  app->add_option("--scale", f.scale, "Sweep spacing")->check(CLI::IsMember({"linear", "log"}));
}

void add_mc_flags(CLI::App* app, McFlags& f, bool with_validate_flag) {
  if (with_validate_flag) app->add_flag("--validate", f.validate, "Add Monte Carlo estimates");
  app->add_option("--drops", f.drops, "Monte Carlo drops")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Monte Carlo seed (generated and printed when omitted)");
  app->add_option("--fidelity", f.fidelity, "Monte Carlo fidelity")
      ->check(CLI::IsMember({"distribution", "channel"}));
  app->add_option("--sim-radius", f.sim_radius, "Truncation radius of the Poisson process (m)");
  app->add_option("--threads", f.threads, "Worker threads (0: all, capped by HETSIM_THREADS)");
}

void add_output_flags(CLI::App* app, OutputFlags& f) {
  app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--output,-o", f.output, "Output file (default: standard output)");
  app->add_flag("--timing", f.timing, "Add a wall_time_s column (not reproducible)");
}

NetworkParams build_params(const ParamFlags& f) {
  NetworkParams p;
  if (f.preset == "fig1") {
    p = hetnet::fig1_params();
  } else if (f.preset == "table1") {
    p = hetnet::table1_params(f.k.value_or(10), f.n.value_or(100), f.beta.value_or(0.2));
  }
  if (!f.config.empty()) p = hetnet::load_config(f.config, p);
  if (f.n) p.n_antennas = *f.n;
  if (f.k) p.n_mues = *f.k;
  if (f.lambda) p.sc_density = *f.lambda;
  if (f.q) p.dl_fraction = *f.q;
  if (f.alpha) p.pathloss_exponent = *f.alpha;
  if (f.d) p.sc_pair_distance = *f.d;
  if (f.rm) p.macro_radius = *f.rm;
  if (f.t_db) p.sir_threshold = hetnet::db_to_linear(*f.t_db);
  if (f.p_m) p.p_m = *f.p_m;
  if (f.p_mu) p.p_mu = *f.p_mu;
  if (f.p_s) p.p_s = *f.p_s;
  if (f.p_su) p.p_su = *f.p_su;
  if (f.beta) p.nulling_fraction = *f.beta;
  if (f.unclamped) p.clamp_nulling_prob = false;
  p.nulled_count = f.nulling_count == "k" ? hetnet::NullingCount::served_users
                                          : hetnet::NullingCount::degrees_of_freedom;
  return p;
}

std::vector<NetworkParams> sweep_params(const NetworkParams& base, const SweepFlags& f,
                                        const std::string& default_parameter = {}) {
  const std::string parameter = f.parameter.empty() ? default_parameter : f.parameter;
  if (!f.from && !f.to) {
    if (!f.parameter.empty()) throw hetnet::ValidationError("sweep", "--sweep needs --from and --to");
    return {base};
  }
  if (!f.from || !f.to) throw hetnet::ValidationError("sweep", "--from and --to go together");
  if (parameter.empty()) throw hetnet::ValidationError("sweep", "--from/--to need --sweep NAME");
  SweepSpec spec{parameter, *f.from, *f.to, f.points,
                 f.scale == "log" ? SweepScale::log : SweepScale::linear};
  std::vector<NetworkParams> out;
  for (const double v : sweep_values(spec)) out.push_back(with_parameter(base, parameter, v));
  return out;
}

Format parse_format(const std::string& s) { return s == "json" ? Format::json : Format::csv; }

hetnet::Fidelity parse_fidelity(const std::string& s) {
  return s == "channel" ? hetnet::Fidelity::channel : hetnet::Fidelity::distribution;
}

std::uint64_t resolve_seed(const McFlags& f, std::ostream& err) {
  if (f.seed) return *f.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << seed << '\n';
  return seed;
}

void emit(const std::vector<Record>& records, const OutputFlags& f, std::ostream& out) {
  if (f.output.empty()) {
    write_records(out, records, parse_format(f.format));
    return;
  }
  std::ostringstream buffer;
  write_records(buffer, records, parse_format(f.format));
  std::ofstream file(f.output, std::ios::binary);
  if (!file) throw hetnet::ValidationError("output", "cannot open " + f.output + " for writing");
  file << buffer.str();
  if (!file) throw hetnet::ValidationError("output", "failed writing " + f.output);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Row {
  std::string quantity;
  hetnet::Tier tier;
  hetnet::Direction direction;
  std::string method;
  double coverage;
  double error_estimate;
  int n_terms;
  bool extended;
  double ase;
  const hetnet::McEstimate* mc = nullptr;
  double seconds = 0.0;
};

Row coverage_row(std::string quantity, hetnet::Tier tier, hetnet::Direction direction,
                 const hetnet::CoverageResult& c, double ase) {
  return {std::move(quantity), tier, direction, std::string(to_string(c.method)), c.value,
          c.error_estimate, c.n_terms, c.extended_precision, ase};
}

void add_row_fields(Record& r, const Row& row, bool with_mc, const McFlags& mc, std::uint64_t seed,
                    bool timing) {
  r.add("quantity", row.quantity)
      .add("tier", to_string(row.tier))
      .add("direction", to_string(row.direction))
      .add("method", row.method)
      .add("coverage", row.coverage)
      .add("error_estimate", row.error_estimate)
      .add("n_terms", row.n_terms)
      .add("extended_precision", row.extended)
      .add("ase", row.ase);
  if (with_mc) {
    const double nan = std::nan("");
    const hetnet::McEstimate* e = row.mc;
    r.add("mc_coverage", e ? e->mean : nan)
        .add("mc_lower", e ? e->lower : nan)
        .add("mc_upper", e ? e->upper : nan)
        .add("mc_half_width", e ? e->half_width : nan)
        .add("mc_drops", e ? e->n_drops : std::uint64_t{0})
        .add("seed", seed)
        .add("fidelity", mc.fidelity)
        .add("inside_ci", e ? Value{e->contains(row.coverage)} : Value{std::string("n/a")});
  }
  if (timing) r.add("wall_time_s", row.seconds);
}

hetnet::EvalOptions eval_options(bool extended) {
  hetnet::EvalOptions o;
  if (extended) o.precision = hetnet::Precision::extended;
  return o;
}

hetnet::DropConfig drop_config(const NetworkParams& p, const McFlags& f, std::uint64_t seed) {
  hetnet::DropConfig cfg;
  cfg.params = p;
  cfg.n_drops = f.drops;
  cfg.seed = seed;
  cfg.fidelity = parse_fidelity(f.fidelity);
  cfg.sim_radius = f.sim_radius;
  cfg.threads = f.threads;
  return cfg;
}

struct UplinkFlags {
  ParamFlags params;
  SweepFlags sweep;
  McFlags mc;
  OutputFlags output;
  bool bound = false;
  bool strict_bound = false;
  bool uncorrelated = false;
  bool extended = false;
};

std::vector<Record> cmd_uplink(const UplinkFlags& f, std::ostream& err) {
  const NetworkParams base = build_params(f.params);
  const std::uint64_t seed = f.mc.validate ? resolve_seed(f.mc, err) : 0;
  const hetnet::EvalOptions opts = eval_options(f.extended);
  std::vector<Record> out;
  for (const NetworkParams& p : sweep_params(base, f.sweep)) {
    hetnet::validate(p);
    const double log_rate = std::log2(1.0 + p.sir_threshold);
    std::vector<Row> rows;
    std::vector<hetnet::McEstimate> estimates;
    estimates.reserve(3);
    const hetnet::DropConfig cfg = drop_config(p, f.mc, seed);

    if (p.n_mues >= 1) {
      auto start = Clock::now();
      const hetnet::AseResult macro = hetnet::macro_ase_ul(p, opts);
      rows.push_back(coverage_row("mue_ul", hetnet::Tier::macro, hetnet::Direction::uplink,
                                  macro.coverage.at(0), macro.value));
      rows.back().seconds = seconds_since(start);
      if (f.mc.validate) {
        estimates.push_back(hetnet::estimate_uplink_mue_coverage(cfg));
        rows.back().mc = &estimates.back();
      }
      if (f.bound || f.strict_bound) {
        start = Clock::now();
        hetnet::BoundOptions bopts;
        bopts.strict = f.strict_bound;
        const hetnet::CoverageBound b = hetnet::uplink_mue_coverage_bound(p, bopts);
        Row row{"mue_ul_bound", hetnet::Tier::macro, hetnet::Direction::uplink, "quadrature",
                b.value, b.error_estimate, p.n_antennas, false, p.n_mues * b.value * log_rate};
        row.seconds = seconds_since(start);
        rows.push_back(row);
      }
      if (f.uncorrelated) {
        start = Clock::now();
        const hetnet::AseResult u = hetnet::macro_ase_ul_uncorrelated(p, opts);
        rows.push_back(coverage_row("mue_ul_uncorrelated", hetnet::Tier::macro,
                                    hetnet::Direction::uplink, u.coverage.at(0), u.value));
        rows.back().seconds = seconds_since(start);
      }
    }

    auto start = Clock::now();
    const hetnet::AseResult sc = hetnet::sc_ase_ul(p, opts);
    const double sc_seconds = seconds_since(start);
    rows.push_back(coverage_row("sue_ul", hetnet::Tier::small_cell, hetnet::Direction::uplink,
                                sc.coverage.at(0), sc.value));
    rows.back().seconds = sc_seconds;
    if (f.mc.validate) {
      estimates.push_back(hetnet::estimate_sue_coverage_ul(cfg));
      rows.back().mc = &estimates.back();
    }
    rows.push_back(coverage_row("sbs_ul", hetnet::Tier::small_cell, hetnet::Direction::uplink,
                                sc.coverage.at(1), sc.value));
    rows.back().seconds = sc_seconds;
    if (f.mc.validate) {
      estimates.push_back(hetnet::estimate_sbs_coverage_ul(cfg));
      rows.back().mc = &estimates.back();
    }

    for (const Row& row : rows) {
      Record r;
      add_param_fields(r, p);
      add_row_fields(r, row, f.mc.validate, f.mc, seed, f.output.timing);
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct DownlinkFlags {
  ParamFlags params;
  SweepFlags sweep;
  McFlags mc;
  OutputFlags output;
  bool extended = false;
};

std::vector<Record> cmd_downlink(const DownlinkFlags& f, std::ostream& err) {
  const NetworkParams base = build_params(f.params);
  const std::uint64_t seed = f.mc.validate ? resolve_seed(f.mc, err) : 0;
  const hetnet::EvalOptions opts = eval_options(f.extended);
  std::vector<Record> out;
  for (const NetworkParams& p : sweep_params(base, f.sweep)) {
    hetnet::validate(p, hetnet::LinkContext::downlink);
    const hetnet::DerivedConstants dc = hetnet::derive(p);
    std::optional<hetnet::DownlinkEstimates> mc;
    if (f.mc.validate) mc = hetnet::estimate_dl_coverage(drop_config(p, f.mc, seed));

    std::vector<Row> rows;
    auto start = Clock::now();
    const hetnet::AseResult macro = hetnet::macro_ase_dl(p, opts);
    rows.push_back(coverage_row("mue_dl", hetnet::Tier::macro, hetnet::Direction::downlink,
                                macro.coverage.at(0), macro.value));
    rows.back().seconds = seconds_since(start);
    if (mc) rows.back().mc = &mc->mue;

    if (p.nulling_fraction == 1.0) {
      start = Clock::now();
      const hetnet::CoverageResult cf = hetnet::dl_mue_coverage_closed_form(p);
      const double ase = p.n_mues * cf.value * std::log2(1.0 + p.sir_threshold);
      rows.push_back(coverage_row("mue_dl_closed_form", hetnet::Tier::macro,
                                  hetnet::Direction::downlink, cf, ase));
      rows.back().seconds = seconds_since(start);
      if (mc) rows.back().mc = &mc->mue;
    }

    start = Clock::now();
    const hetnet::AseResult sc = hetnet::sc_ase_dl(p, opts);
    rows.push_back(coverage_row("sbs_dl", hetnet::Tier::small_cell, hetnet::Direction::downlink,
                                sc.coverage.at(0), sc.value));
    rows.back().seconds = seconds_since(start);
    if (mc) rows.back().mc = &mc->sbs;

    for (const Row& row : rows) {
      Record r;
      add_param_fields(r, p);
      r.add("nulled_count", dc.nulled_count)
          .add("gain_shape", dc.gain_shape)
          .add("nulling_prob", dc.effective_nulling_prob(p.clamp_nulling_prob))
          .add("nulling_prob_raw", dc.nulling_prob_raw)
          .add("delta", dc.delta);
      add_row_fields(r, row, f.mc.validate, f.mc, seed, f.output.timing);
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct OptimalQFlags {
  ParamFlags params;
  SweepFlags sweep;
  OutputFlags output;
};

std::vector<Record> cmd_optimal_q(const OptimalQFlags& f) {
  const NetworkParams base = build_params(f.params);
  std::vector<Record> out;
  for (const NetworkParams& p : sweep_params(base, f.sweep, "sc_density")) {
    hetnet::validate(p);
    if (!(p.sc_density > 0.0)) throw hetnet::ValidationError("sc_density", "optimal-q needs lambda > 0");
    const auto start = Clock::now();
    const hetnet::QOptimum opt = hetnet::optimal_q(p, p.sc_density);
    const double seconds = seconds_since(start);
    auto ase_at = [&](double q) {
      NetworkParams pq = p;
      pq.dl_fraction = q;
      return hetnet::sc_ase_ul(pq).value;
    };
    Record r;
    add_param_fields(r, p);
    r.add("q_opt", opt.q)
        .add("ase_opt", opt.ase)
        .add("ase_q0", ase_at(0.0))
        .add("ase_q0.5", ase_at(0.5))
        .add("ase_q1", ase_at(1.0));
    if (f.output.timing) r.add("wall_time_s", seconds);
    out.push_back(std::move(r));
  }
  return out;
}

struct ValidateFlags {
  McFlags mc;
  OutputFlags output;
};

std::vector<Record> cmd_validate(const ValidateFlags& f, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(f.mc, err);
  return run_validation(standard_validation_grid(), f.mc.drops, seed,
                        parse_fidelity(f.mc.fidelity), f.mc.threads, f.mc.sim_radius);
}

struct ReproduceFlags {
  std::string target;
  std::string output_dir = ".";
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw hetnet::ValidationError("output-dir", "cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw hetnet::ValidationError("output-dir", "failed writing " + path.string());
}

void cmd_reproduce(const ReproduceFlags& f, std::ostream& out) {
  const std::filesystem::path dir(f.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw hetnet::ValidationError("output-dir", "cannot create " + dir.string());
  const std::vector<Record> records = f.target == "table1" ? reproduce_table1() : reproduce_fig1();
  std::ostringstream csv;
  write_csv(csv, records);
  const std::filesystem::path csv_path = dir / (f.target + ".csv");
  const std::filesystem::path report_path = dir / "calibration_report.txt";
  write_text(csv_path, csv.str());
  write_text(report_path, calibration_report());
  out << csv_path.string() << '\n' << report_path.string() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage and area spectral efficiency of a massive-MIMO macro cell overlaid "
               "with flexible-duplex small cells",
               "hetsim"};
  app.require_subcommand(1);

  UplinkFlags up;
  CLI::App* uplink = app.add_subcommand("uplink", "Uplink coverage and ASE of both tiers");
  add_param_flags(uplink, up.params);
  add_sweep_flags(uplink, up.sweep);
  add_mc_flags(uplink, up.mc, true);
  add_output_flags(uplink, up.output);
  uplink->add_flag("--bound", up.bound, "Add the macro-user coverage upper bound");
  uplink->add_flag("--strict-bound", up.strict_bound,
                   "Like --bound, but fail where the bound is only trivially 1");
  uplink->add_flag("--uncorrelated", up.uncorrelated, "Add the uncorrelated-combiner macro ASE");
  uplink->add_flag("--extended", up.extended, "Evaluate tail sums in 113-bit arithmetic");

  DownlinkFlags down;
  CLI::App* downlink = app.add_subcommand("downlink", "Downlink coverage and ASE with nulling");
  add_param_flags(downlink, down.params);
  add_sweep_flags(downlink, down.sweep);
  add_mc_flags(downlink, down.mc, true);
  add_output_flags(downlink, down.output);
  downlink->add_flag("--extended", down.extended, "Evaluate tail sums in 113-bit arithmetic");

  OptimalQFlags oq;
  CLI::App* optimal = app.add_subcommand("optimal-q", "Duplex split maximizing the small-cell ASE");
  add_param_flags(optimal, oq.params);
  add_sweep_flags(optimal, oq.sweep);
  add_output_flags(optimal, oq.output);

  ValidateFlags val;
  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo check of every analytic coverage");
  add_mc_flags(validate, val.mc, false);
  add_output_flags(validate, val.output);

  ReproduceFlags rep;
  CLI::App* reproduce = app.add_subcommand("reproduce", "Regenerate the table1 or fig1 data set");
  reproduce->add_option("target", rep.target, "table1 or fig1")
      ->required()
      ->check(CLI::IsMember({"table1", "fig1"}));
  reproduce->add_option("--output-dir", rep.output_dir, "Directory for CSV and report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (uplink->parsed()) {
      emit(cmd_uplink(up, err), up.output, out);
    } else if (downlink->parsed()) {
      emit(cmd_downlink(down, err), down.output, out);
    } else if (optimal->parsed()) {
      emit(cmd_optimal_q(oq), oq.output, out);
    } else if (validate->parsed()) {
      emit(cmd_validate(val, err), val.output, out);
    } else if (reproduce->parsed()) {
      cmd_reproduce(rep, out);
    }
  } catch (const hetnet::ValidationError& e) {
    err << "error: invalid " << e.what() << '\n';
    return exit_input;
  } catch (const hetnet::Error& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_ok;
}

}  // namespace hetsim
