#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

/// Fixed 17-significant-digit formatting; every number the harness emits goes
/// through here so reruns of the same config are byte-identical.
std::string format_g17(double v);

/// Parse an angle token: a decimal number or a multiple of pi written as
/// "pi", "3/2pi", "3pi/2", "-pi/4", "0.75pi". Throws std::invalid_argument.
double parse_angle(const std::string& token);

struct TableSection {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Schema-tagged rows plus a metadata block echoing the resolved config.
/// Sections live in a deque so references from add_section stay valid while
/// later sections are added.
struct ResultTable {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;
  std::deque<TableSection> sections;

  void add_meta(const std::string& key, const std::string& value);
  void add_meta(const std::string& key, double value);
  TableSection& add_section(const std::string& name, std::vector<std::string> columns);

  std::string to_csv() const;
  std::string to_json() const;
};

/// Re-parse a serialized table (used by the round-trip checks).
ResultTable parse_csv(const std::string& text);

}  // namespace qwalk
