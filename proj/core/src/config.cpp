#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/netmodel.hpp"

namespace hetnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(std::string(key), "not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(std::string(key), "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

void assign(NetworkParams& p, std::string_view key, std::string_view value) {
  if (key == "n_antennas") {
    p.n_antennas = parse_int(key, value);
  } else if (key == "n_mues") {
    p.n_mues = parse_int(key, value);
  } else if (key == "sc_density") {
    p.sc_density = parse_double(key, value);
  } else if (key == "dl_fraction") {
    p.dl_fraction = parse_double(key, value);
  } else if (key == "pathloss_exponent") {
    p.pathloss_exponent = parse_double(key, value);
  } else if (key == "sc_pair_distance") {
    p.sc_pair_distance = parse_double(key, value);
  } else if (key == "macro_radius") {
    p.macro_radius = parse_double(key, value);
  } else if (key == "sir_threshold_db") {
    p.sir_threshold = db_to_linear(parse_double(key, value));
  } else if (key == "p_m") {
    p.p_m = parse_double(key, value);
  } else if (key == "p_mu") {
    p.p_mu = parse_double(key, value);
  } else if (key == "p_s") {
    p.p_s = parse_double(key, value);
  } else if (key == "p_su") {
    p.p_su = parse_double(key, value);
  } else if (key == "nulling_fraction") {
    p.nulling_fraction = parse_double(key, value);
  } else {
    throw ValidationError(std::string(key), "unknown configuration key");
  }
}

}  // namespace

NetworkParams parse_config(std::string_view text, NetworkParams base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    assign(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

NetworkParams load_config(const std::string& path, NetworkParams base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), base);
}

}  // namespace hetnet
