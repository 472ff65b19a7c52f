#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hetsim/app.hpp"
#include "hetsim/records.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hetsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = hetsim::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) cells.push_back(cell);
  return cells;
}

// CSV without quoted commas into header-keyed rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  const std::string& at(std::size_t row, const std::string& name) const {
    return rows.at(row).at(col(name));
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(at(row, name)); }
};

Table parse_csv(const std::string& text) {
  Table t;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  t.header = split(line);
  while (std::getline(ss, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("downlink"), std::string::npos);
}

TEST(Cli, BadInputExitsTwo) {
  EXPECT_EQ(invoke({"uplink", "--bogus"}).code, hetsim::exit_input);
  EXPECT_EQ(invoke({}).code, hetsim::exit_input);
  const auto r = invoke({"uplink", "--n", "0"});
  EXPECT_EQ(r.code, hetsim::exit_input);
  EXPECT_NE(r.err.find("n_antennas"), std::string::npos);
  EXPECT_EQ(invoke({"downlink", "--k", "20", "--n", "10"}).code, hetsim::exit_input);
  EXPECT_EQ(invoke({"uplink", "--config", "/nonexistent/params.cfg"}).code, hetsim::exit_input);
  EXPECT_EQ(invoke({"uplink", "--format", "xml"}).code, hetsim::exit_input);
}

TEST(Cli, NumericFailureExitsThree) {
  const auto r = invoke({"uplink", "--n", "8", "--k", "2", "--strict-bound"});
  EXPECT_EQ(r.code, hetsim::exit_numeric);
  EXPECT_NE(r.err.find("n = "), std::string::npos);
}

TEST(Cli, DownlinkFullNullingRow) {
  const auto r = invoke({"downlink", "--preset", "table1", "--k", "10", "--n", "100", "--beta", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.at(0, "quantity"), "mue_dl");
  EXPECT_EQ(t.at(1, "quantity"), "mue_dl_closed_form");
  EXPECT_EQ(t.at(2, "quantity"), "sbs_dl");
  EXPECT_NEAR(t.num(0, "ase"), 0.375114, 1e-5);
  EXPECT_NEAR(t.num(0, "coverage"), t.num(1, "coverage"), 1e-9);
  EXPECT_EQ(t.at(0, "gain_shape"), "0");
  EXPECT_EQ(t.at(0, "nulled_count"), "90");
}

TEST(Cli, DownlinkPartialNullingHasNoClosedForm) {
  const auto r = invoke({"downlink", "--preset", "table1", "--beta", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).rows.size(), 2u);
}

TEST(Cli, UplinkWithoutInterferenceIsCovered) {
  const auto r = invoke({"uplink", "--n", "1", "--k", "1", "--lambda", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  EXPECT_EQ(t.at(0, "quantity"), "mue_ul");
  EXPECT_NEAR(t.num(0, "coverage"), 1.0, 1e-12);
}

TEST(Cli, UplinkSchema) {
  const auto r = invoke({"uplink", "--n", "4", "--k", "2", "--bound", "--uncorrelated"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  const std::vector<std::string> tail = {"quantity", "tier",  "direction", "method", "coverage",
                                         "error_estimate", "n_terms", "extended_precision", "ase"};
  ASSERT_GE(t.header.size(), tail.size());
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), t.header.end() - tail.size()));
  EXPECT_EQ(t.header.front(), "n_antennas");
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(t.at(1, "quantity"), "mue_ul_bound");
  EXPECT_GE(t.num(1, "coverage"), t.num(0, "coverage"));
  EXPECT_EQ(t.at(2, "quantity"), "mue_ul_uncorrelated");
}

TEST(Cli, JsonParses) {
  const auto r = invoke({"downlink", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["quantity"], "mue_dl");
  EXPECT_TRUE(j[0]["coverage"].is_number());
  EXPECT_TRUE(j[0]["clamp_nulling_prob"].is_boolean());
}

TEST(Cli, SweepProducesOneBlockPerPoint) {
  const auto r = invoke({"uplink", "--n", "2", "--k", "2", "--sweep", "sc_density", "--from",
                         "1e-4", "--to", "1e-2", "--points", "3", "--scale", "log"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 9u);
  EXPECT_EQ(t.at(0, "sc_density"), "1e-04");
  EXPECT_EQ(t.at(3, "sc_density"), "0.001");
  EXPECT_EQ(t.at(6, "sc_density"), "0.01");
}

TEST(Cli, OptimalQColumns) {
  const auto r = invoke({"optimal-q", "--preset", "fig1", "--from", "1e-4", "--to", "1e-2",
                         "--points", "3", "--scale", "log"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const double best = t.num(i, "ase_opt");
    EXPECT_GE(best * (1 + 1e-12), t.num(i, "ase_q0"));
    EXPECT_GE(best * (1 + 1e-12), t.num(i, "ase_q0.5"));
    EXPECT_GE(best * (1 + 1e-12), t.num(i, "ase_q1"));
  }
  EXPECT_GT(t.num(0, "q_opt"), t.num(2, "q_opt"));
}

TEST(Cli, ValidateMissingSeedIsGeneratedAndReported) {
  const auto r = invoke({"uplink", "--n", "2", "--k", "2", "--validate", "--drops", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.rfind("seed: ", 0), 0u) << r.err;
  const Table t = parse_csv(r.out);
  EXPECT_EQ(t.at(0, "mc_drops"), "200");
  EXPECT_EQ(t.at(0, "seed"), r.err.substr(6, r.err.find('\n') - 6));
}

TEST(Cli, ValidateIsByteReproducible) {
  const std::vector<std::string> args = {"validate", "--drops", "300", "--seed", "3"};
  const auto a = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = invoke({"validate", "--drops", "300", "--seed", "3", "--threads", "1"});
  EXPECT_EQ(a.out, b.out);
  const Table t = parse_csv(a.out);
  EXPECT_GE(t.rows.size(), 12u);
  for (const char* c : {"analytic", "mc_lower", "mc_upper", "inside_ci", "fidelity"}) {
    EXPECT_NO_THROW(t.col(c)) << c;
  }
}

TEST(Cli, OutputFile) {
  const fs::path dir = fs::temp_directory_path() / "hetsim_cli_output";
  fs::create_directories(dir);
  const fs::path file = dir / "dl.csv";
  const auto r = invoke({"downlink", "-o", file.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(parse_csv(slurp(file)).rows.size(), 2u);
  fs::remove_all(dir);
}

TEST(Cli, ReproduceWritesTargetAndReport) {
  const fs::path dir = fs::temp_directory_path() / "hetsim_cli_reproduce";
  fs::remove_all(dir);
  const auto r = invoke({"reproduce", "table1", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Table t = parse_csv(slurp(dir / "table1.csv"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"K", "N", "beta", "macro_ase", "sc_ase",
                                                "paper_macro_ase", "paper_sc_ase", "rel_dev"}));
  EXPECT_EQ(t.rows.size(), 9u);
  EXPECT_TRUE(fs::exists(dir / "calibration_report.txt"));
  const auto f = invoke({"reproduce", "fig1", "--output-dir", dir.string()});
  ASSERT_EQ(f.code, 0) << f.err;
  const Table g = parse_csv(slurp(dir / "fig1.csv"));
  EXPECT_EQ(g.header, (std::vector<std::string>{"lambda", "q", "sc_ase", "p_sue", "p_sbs"}));
  EXPECT_EQ(g.rows.size(), 63u);
  EXPECT_EQ(invoke({"reproduce", "fig9", "--output-dir", dir.string()}).code, hetsim::exit_input);
  fs::remove_all(dir);
}

TEST(Records, FormattingAndEscaping) {
  EXPECT_EQ(hetsim::format_double(0.5), "0.5");
  EXPECT_EQ(hetsim::format_double(std::nan("")), "nan");
  EXPECT_EQ(hetsim::format_double(-INFINITY), "-inf");
  EXPECT_EQ(hetsim::csv_escape("plain"), "plain");
  EXPECT_EQ(hetsim::csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(hetsim::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(hetsim::format_double(x)), x);
}

TEST(Records, JsonNonFiniteIsNull) {
  hetsim::Record r;
  r.add("x", std::nan("")).add("n", 3).add("b", true).add("s", "t");
  std::ostringstream os;
  hetsim::write_json(os, {r});
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_TRUE(j[0]["x"].is_null());
  EXPECT_EQ(j[0]["n"], 3);
  EXPECT_EQ(j[0]["b"], true);
}

TEST(Records, CsvRejectsMixedSchemas) {
  hetsim::Record a, b;
  a.add("x", 1);
  b.add("y", 1);
  std::ostringstream os;
  EXPECT_ANY_THROW(hetsim::write_csv(os, {a, b}));
}

TEST(Sweep, LinearAndLogValues) {
  const auto lin = hetsim::sweep_values({"sc_density", 0.0, 1.0, 5, hetsim::SweepScale::linear});
  EXPECT_EQ(lin, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto lg = hetsim::sweep_values({"sc_density", 1e-3, 1e-1, 3, hetsim::SweepScale::log});
  ASSERT_EQ(lg.size(), 3u);
  EXPECT_EQ(lg[0], 1e-3);
  EXPECT_EQ(lg[1], 1e-2);
  EXPECT_EQ(lg[2], 1e-1);
  const auto ints = hetsim::sweep_values({"n_antennas", 1, 3, 7, hetsim::SweepScale::linear});
  EXPECT_EQ(ints, (std::vector<double>{1, 2, 3}));
  EXPECT_ANY_THROW(hetsim::sweep_values({"sc_density", 0.0, 1.0, 3, hetsim::SweepScale::log}));
}

TEST(Sweep, WithParameterUsesConfigKeys) {
  const auto p = hetsim::with_parameter(hetnet::NetworkParams{}, "sir_threshold_db", 10.0);
  EXPECT_NEAR(p.sir_threshold, 10.0, 1e-12);
  EXPECT_ANY_THROW(hetsim::with_parameter(hetnet::NetworkParams{}, "no_such_key", 1.0));
}

TEST(ValidationGrid, SpansRequiredValues) {
  const auto grid = hetsim::standard_validation_grid();
  EXPECT_GE(grid.size(), 12u);
  auto has = [&](auto pred) { return std::any_of(grid.begin(), grid.end(), pred); };
  for (int n : {1, 8, 32}) {
    EXPECT_TRUE(has([&](const auto& c) {
      return c.link == hetsim::ValidationLink::uplink_mue && c.params.n_antennas == n;
    })) << n;
  }
  for (int k : {1, 4, 10}) {
    EXPECT_TRUE(has([&](const auto& c) {
      return c.link != hetsim::ValidationLink::downlink && c.params.n_mues == k;
    })) << k;
  }
  for (double q : {0.0, 0.5, 1.0}) {
    EXPECT_TRUE(has([&](const auto& c) {
      return c.link != hetsim::ValidationLink::downlink && c.params.dl_fraction == q;
    })) << q;
  }
  for (double b : {0.0, 0.5, 1.0}) {
    EXPECT_TRUE(has([&](const auto& c) {
      return c.link == hetsim::ValidationLink::downlink && c.params.nulling_fraction == b;
    })) << b;
  }
  EXPECT_NE(hetsim::case_seed(7, 0), hetsim::case_seed(7, 1));
  EXPECT_EQ(hetsim::case_seed(7, 3), hetsim::case_seed(7, 3));
}

TEST(Reproduce, Fig1Shape) {
  const auto recs = hetsim::reproduce_fig1();
  const auto n = hetsim::fig1_densities().size();
  EXPECT_EQ(recs.size(), 3 * n);
  EXPECT_EQ(n, 21u);
}

TEST(Records, LargeUnsignedStaysUnsigned) {
  hetsim::Record r;
  r.add("seed", std::uint64_t{18446744073709551615ull});
  EXPECT_EQ(hetsim::format_value(*r.find("seed")), "18446744073709551615");
  std::ostringstream os;
  hetsim::write_json(os, {r});
  EXPECT_EQ(nlohmann::json::parse(os.str())[0]["seed"].get<std::uint64_t>(), 18446744073709551615ull);
}
