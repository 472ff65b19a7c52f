#pragma once

// Flat result records shared by every subcommand. A record is an ordered
// list of named scalar fields; all records written together must carry the
// same field names in the same order.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hetnet/netmodel.hpp"

namespace hetsim {

using Value = std::variant<std::int64_t, std::uint64_t, double, bool, std::string>;

class Record {
 public:
  Record& add(std::string name, Value value);
  Record& add(std::string name, double value) { return add(std::move(name), Value{value}); }
  Record& add(std::string name, bool value) { return add(std::move(name), Value{value}); }
  Record& add(std::string name, int value) { return add(std::move(name), Value{std::int64_t{value}}); }
  Record& add(std::string name, std::int64_t value) { return add(std::move(name), Value{value}); }
  Record& add(std::string name, std::uint64_t value) {
    return add(std::move(name), Value{value});
  }
  Record& add(std::string name, std::string value) { return add(std::move(name), Value{std::move(value)}); }
  Record& add(std::string name, const char* value) { return add(std::move(name), Value{std::string(value)}); }
  Record& add(std::string name, std::string_view value) {
    return add(std::move(name), Value{std::string(value)});
  }

  const std::vector<std::pair<std::string, Value>>& fields() const noexcept { return fields_; }
  const Value* find(std::string_view name) const noexcept;

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

enum class Format { csv, json };

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double x);
std::string format_value(const Value& v);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Throws std::invalid_argument if the records disagree on their fields.
void write_csv(std::ostream& os, const std::vector<Record>& records);
void write_json(std::ostream& os, const std::vector<Record>& records);
void write_records(std::ostream& os, const std::vector<Record>& records, Format format);

/// The input parameter columns shared by uplink/downlink/optimal-q records.
void add_param_fields(Record& r, const hetnet::NetworkParams& p);

}  // namespace hetsim
