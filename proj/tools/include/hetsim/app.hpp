#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hetnet/mcsim.hpp"
#include "hetnet/netmodel.hpp"
#include "hetsim/records.hpp"

namespace hetsim {

enum ExitCode : int {
  exit_ok = 0,
  exit_input = 2,    ///< bad flags, parameters or files
  exit_numeric = 3,  ///< a result could not be computed to the required accuracy
};

/// Entry point of the `hetsim` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// ---- sweeps ---------------------------------------------------------------

enum class SweepScale { linear, log };

struct SweepSpec {
  std::string parameter;  ///< a configuration key, e.g. sc_density or sir_threshold_db
  double from = 0.0;
  double to = 0.0;
  int points = 2;
  SweepScale scale = SweepScale::linear;
};

/// Sweep abscissae. Integer parameters are rounded and deduplicated.
std::vector<double> sweep_values(const SweepSpec& spec);
/// `base` with one configuration key replaced.
hetnet::NetworkParams with_parameter(const hetnet::NetworkParams& base, const std::string& key,
                                     double value);

// ---- Monte Carlo validation grid -------------------------------------------

enum class ValidationLink { uplink_mue, uplink_sue, uplink_sbs, downlink };

struct ValidationCase {
  std::string name;
  ValidationLink link;
  hetnet::NetworkParams params;
};

/// Uplink configurations over N in {1, 8, 32}, K in {1, 4, 10}, q in
/// {0, 0.5, 1} and downlink over beta in {0, 0.5, 1}.
std::vector<ValidationCase> standard_validation_grid();

/// Per-case seed so cases use independent streams.
std::uint64_t case_seed(std::uint64_t seed, std::size_t index) noexcept;

/// One record per (case, coverage quantity): analytic value, Monte Carlo
/// estimate with its 99% interval, and whether the interval holds the
/// analytic value.
std::vector<Record> run_validation(const std::vector<ValidationCase>& cases, std::uint64_t drops,
                                   std::uint64_t seed, hetnet::Fidelity fidelity,
                                   unsigned threads = 0, double sim_radius = 0.0);

// ---- reproduction targets ---------------------------------------------------

struct Table1Reference {
  int n_mues;
  int n_antennas;
  double nulling_fraction;
  double macro_ase;
  double sc_ase;
};

const std::vector<Table1Reference>& table1_reference();

/// K, N, beta, macro_ase, sc_ase, paper_macro_ase, paper_sc_ase, rel_dev.
/// sc_ase uses the unclamped nulling probability; rel_dev is the relative
/// deviation of the macro column.
std::vector<Record> reproduce_table1();

/// Log-spaced densities of the density sweep.
std::vector<double> fig1_densities();
inline constexpr double kFig1Qs[] = {0.2, 0.5, 0.8};

/// lambda, q, sc_ase, p_sue, p_sbs.
std::vector<Record> reproduce_fig1();

/// Every inferred parameter and every deviation from the reference values.
std::string calibration_report();

}  // namespace hetsim
