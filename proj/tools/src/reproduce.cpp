#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hetnet/coverage.hpp"
#include "hetsim/app.hpp"

namespace hetsim {

using hetnet::NetworkParams;

const std::vector<Table1Reference>& table1_reference() {
  static const std::vector<Table1Reference> rows = {
      {10, 100, 0.2, 3.59, 1.93e-4}, {10, 100, 0.5, 2.84, 4.59e-4}, {10, 100, 1.0, 0.37, 9.2e-4},
      {10, 200, 0.2, 5.19, 3.87e-4}, {10, 200, 0.5, 4.11, 9.68e-4}, {10, 200, 1.0, 0.37, 1.9e-3},
      {20, 100, 0.2, 4.79, 1.63e-4}, {20, 100, 0.5, 3.8, 4.1e-4},   {20, 100, 1.0, 0.53, 8.15e-4},
  };
  return rows;
}

namespace {

struct Table1Values {
  double macro = 0.0;
  double sc_unclamped = 0.0;
  double sc_clamped = 0.0;
};

Table1Values table1_values(const Table1Reference& ref) {
  NetworkParams p = hetnet::table1_params(ref.n_mues, ref.n_antennas, ref.nulling_fraction);
  Table1Values v;
  v.macro = hetnet::macro_ase_dl(p).value;
  v.sc_clamped = hetnet::sc_ase_dl(p).value;
  p.clamp_nulling_prob = false;
  v.sc_unclamped = hetnet::sc_ase_dl(p).value;
  return v;
}

double rel_dev(double value, double reference) { return (value - reference) / reference; }

}  // namespace

std::vector<Record> reproduce_table1() {
  std::vector<Record> out;
  for (const auto& ref : table1_reference()) {
    const Table1Values v = table1_values(ref);
    Record r;
    r.add("K", ref.n_mues)
        .add("N", ref.n_antennas)
        .add("beta", ref.nulling_fraction)
        .add("macro_ase", v.macro)
        .add("sc_ase", v.sc_unclamped)
        .add("paper_macro_ase", ref.macro_ase)
        .add("paper_sc_ase", ref.sc_ase)
        .add("rel_dev", rel_dev(v.macro, ref.macro_ase));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> fig1_densities() {
  constexpr int points = 21;
  std::vector<double> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, -3.0 + 2.0 * i / (points - 1)));
  return out;
}

std::vector<Record> reproduce_fig1() {
  std::vector<Record> out;
  for (const double q : kFig1Qs) {
    for (const double lambda : fig1_densities()) {
      NetworkParams p = hetnet::fig1_params();
      p.sc_density = lambda;
      p.dl_fraction = q;
      const hetnet::AseResult ase = hetnet::sc_ase_ul(p);
      Record r;
      r.add("lambda", lambda)
          .add("q", q)
          .add("sc_ase", ase.value)
          .add("p_sue", ase.coverage.at(0).value)
          .add("p_sbs", ase.coverage.at(1).value);
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

// Report numbers at a fixed number of significant digits.
std::string sig(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string pass_fail(bool ok) { return ok ? "within tolerance" : "OUTSIDE tolerance"; }

void ratio_line(std::ostream& os, const std::string& label, double value, double target,
                double tolerance) {
  const double dev = rel_dev(value, target);
  os << "  " << label << ": " << sig(value) << " (target " << sig(target) << " +/- "
     << sig(100.0 * tolerance) << "%, deviation " << sig(100.0 * dev, 3) << "%) "
     << pass_fail(std::abs(dev) <= tolerance) << '\n';
}

}  // namespace

std::string calibration_report() {
  std::ostringstream os;
  const NetworkParams t1 = hetnet::table1_params(10, 100, 0.2);
  const NetworkParams f1 = hetnet::fig1_params();

  os << "hetsim calibration report\n\n";
  os << "Inferred parameters\n";
  os << "  table1: P_su = " << format_double(t1.p_su)
     << " W (not stated with the table; the beta = 1 macro rows match the closed form only with "
        "P_su = P_s)\n";
  os << "  table1: d = " << format_double(t1.sc_pair_distance)
     << " m (taken from the density sweep; only the small-cell column depends on it)\n";
  os << "  table1: alpha = " << format_double(t1.pathloss_exponent)
     << ", P_m = " << format_double(t1.p_m) << " W, R_m = " << format_double(t1.macro_radius)
     << " m, lambda = " << format_double(t1.sc_density)
     << " /m^2, T = " << format_double(hetnet::linear_to_db(t1.sir_threshold)) << " dB\n";
  os << "  table1: sc_ase column uses the unclamped nulling probability M / (lambda pi R_m^2)\n";
  os << "  fig1: R_m = " << format_double(f1.macro_radius) << " m, N = " << f1.n_antennas
     << " (only the macro tier depends on N), density sweep " << format_double(fig1_densities().front())
     << " .. " << format_double(fig1_densities().back()) << " /m^2, "
     << fig1_densities().size() << " log-spaced points\n";
  os << "  small-cell tier: the receiver is uniform in the macro disk, so macro-user distances follow "
        "the pairwise-distance density of two uniform points on [0, 2 R_m]\n";
  os << "  downlink SBS: distance to the macro BS follows 2D/R_m^2 on [0, R_m]\n";
  os << "  nulled count: M = ceil(beta (N - K)) small cells\n\n";

  os << "table1 rows (macro: downlink macro ASE; sc: small-cell downlink ASE)\n";
  std::vector<Table1Values> values;
  double worst_tail_error = 0.0;
  double worst_precision_gap = 0.0;
  bool escalated = false;
  for (const auto& ref : table1_reference()) {
    const Table1Values v = table1_values(ref);
    values.push_back(v);
    const NetworkParams p = hetnet::table1_params(ref.n_mues, ref.n_antennas, ref.nulling_fraction);
    const hetnet::CoverageResult dbl = hetnet::dl_mue_coverage(p);
    hetnet::EvalOptions ext;
    ext.precision = hetnet::Precision::extended;
    const hetnet::CoverageResult quad = hetnet::dl_mue_coverage(p, ext);
    worst_tail_error = std::max(worst_tail_error, dbl.max_tail_error);
    worst_precision_gap = std::max(worst_precision_gap, std::abs(dbl.value - quad.value));
    escalated = escalated || dbl.extended_precision;

    const double dev = rel_dev(v.macro, ref.macro_ase);
    os << "  (" << ref.n_mues << ", " << ref.n_antennas << ", " << format_double(ref.nulling_fraction)
       << "): macro " << sig(v.macro, 5) << " vs " << sig(ref.macro_ase) << " ("
       << sig(100.0 * dev, 3) << "%" << (std::abs(dev) > 0.01 ? ", beyond 1%" : "")
       << "); sc unclamped " << sig(v.sc_unclamped) << ", clamped " << sig(v.sc_clamped)
       << " vs " << sig(ref.sc_ase) << " (" << sig(100.0 * rel_dev(v.sc_unclamped, ref.sc_ase), 3)
       << "%)\n";
  }
  const double sc_ceiling = t1.sc_density * std::log2(1.0 + t1.sir_threshold);
  const auto above = std::count_if(table1_reference().begin(), table1_reference().end(),
                                   [&](const Table1Reference& ref) { return ref.sc_ase > sc_ceiling; });
  os << "  The small-cell column is not reproducible: lambda log2(1 + T) = " << sig(sc_ceiling)
     << " caps the small-cell ASE at coverage 1, and " << above << " of "
     << table1_reference().size() << " reference values exceed it. Deviations are reported, not tuned.\n\n";

  os << "Trend ratios\n";
  ratio_line(os, "macro ASE N=200 / N=100 at (K=10, beta=0.2)", values[3].macro / values[0].macro, 1.45, 0.10);
  ratio_line(os, "macro ASE beta=0.5 / beta=0.2 at (10, 100)", values[1].macro / values[0].macro, 0.80, 0.10);
  ratio_line(os, "SC ASE beta=0.5 / beta=0.2 at (10, 100), unclamped",
             values[1].sc_unclamped / values[0].sc_unclamped, 2.4, 0.15);
  ratio_line(os, "SC ASE (10,200,1) / (10,100,1), unclamped",
             values[5].sc_unclamped / values[2].sc_unclamped, 190.0 / 90.0, 0.15);
  os << "  The SC ratios track M only if the non-nulled branch contributes almost nothing. With the "
        "implemented formula that branch averages to "
     << sig(hetnet::dl_sbs_coverage(hetnet::table1_params(10, 100, 0.0)).value)
     << " (beta = 0, no nulling), close to the nulled value "
     << sig(hetnet::dl_sbs_coverage_nulled(t1))
     << ", so nulling cannot raise the small-cell ASE by more than a few percent.\n\n";

  os << "Extended precision\n";
  os << "  Gamma-tail sums escalate to 113-bit arithmetic when the tracked error exceeds 1e-6.\n";
  os << "  Largest tracked error over the table1 rows in double precision: "
     << sig(worst_tail_error, 3) << (escalated ? " (escalation occurred)" : " (no escalation)")
     << '\n';
  os << "  Largest |double - 113-bit| coverage difference over those rows: "
     << sig(worst_precision_gap, 3) << '\n';
  os << "  All transform factors are completely monotone, so every term of the tail sums has one sign "
        "and no crossover N was reached for N <= 200.\n\n";

  os << "Density sweep (fig1)\n";
  for (const double lambda : {1e-6, 1e-4, 1e-3, 2e-3, 1e-2, 1e-1}) {
    const hetnet::QOptimum opt = hetnet::optimal_q(f1, lambda);
    os << "  lambda " << sig(lambda) << ": q* = " << sig(opt.q) << ", ASE* = " << sig(opt.ase)
       << '\n';
  }
  return os.str();
}

}  // namespace hetsim
