#include "hetsim/records.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace hetsim {

Record& Record::add(std::string name, Value value) {
  fields_.emplace_back(std::move(name), std::move(value));
  return *this;
}

const Value* Record::find(std::string_view name) const noexcept {
  for (const auto& [key, value] : fields_) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

void check_schema(const std::vector<Record>& records) {
  if (records.empty()) return;
  const auto& head = records.front().fields();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields();
    bool same = f.size() == head.size();
    for (std::size_t j = 0; same && j < f.size(); ++j) same = f[j].first == head[j].first;
    if (!same) throw std::invalid_argument("records do not share one schema (record " + std::to_string(i) + ")");
  }
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<Record>& records) {
  check_schema(records);
  if (records.empty()) return;
  const auto& head = records.front().fields();
  for (std::size_t j = 0; j < head.size(); ++j) {
    if (j > 0) os << ',';
    os << csv_escape(head[j].first);
  }
  os << '\n';
  for (const auto& r : records) {
    const auto& f = r.fields();
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (j > 0) os << ',';
      os << csv_escape(format_value(f[j].second));
    }
    os << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<Record>& records) {
  check_schema(records);
  auto array = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.fields()) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) {
                obj[key] = v;
              } else {
                obj[key] = nullptr;
              }
            } else {
              obj[key] = v;
            }
          },
          value);
    }
    array.push_back(std::move(obj));
  }
  os << array.dump(2) << '\n';
}

void write_records(std::ostream& os, const std::vector<Record>& records, Format format) {
  if (format == Format::csv) {
    write_csv(os, records);
  } else {
    write_json(os, records);
  }
}

void add_param_fields(Record& r, const hetnet::NetworkParams& p) {
  r.add("n_antennas", p.n_antennas)
      .add("n_mues", p.n_mues)
      .add("sc_density", p.sc_density)
      .add("dl_fraction", p.dl_fraction)
      .add("pathloss_exponent", p.pathloss_exponent)
      .add("sc_pair_distance", p.sc_pair_distance)
      .add("macro_radius", p.macro_radius)
      .add("sir_threshold_db", hetnet::linear_to_db(p.sir_threshold))
      .add("p_m", p.p_m)
      .add("p_mu", p.p_mu)
      .add("p_s", p.p_s)
      .add("p_su", p.p_su)
      .add("nulling_fraction", p.nulling_fraction)
      .add("clamp_nulling_prob", p.clamp_nulling_prob);
}

}  // namespace hetsim
