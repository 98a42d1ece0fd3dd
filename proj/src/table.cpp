#include "qwalk/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "qwalk/lattice.hpp"

namespace qwalk {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in number: " + s);
  return v;
}

}  // namespace

double parse_angle(const std::string& token) {
  std::string s;
  for (char c : token)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty angle");
  const std::size_t at = s.find("pi");
  if (at == std::string::npos) return parse_number(s);

  std::string head = s.substr(0, at);       // e.g. "3/2", "-", "0.75"
  std::string tail = s.substr(at + 2);      // e.g. "/2", ""
  double factor = 1.0;
  if (head == "-") {
    factor = -1.0;
  } else if (head == "+" || head.empty()) {
    factor = 1.0;
  } else if (const std::size_t slash = head.find('/'); slash != std::string::npos) {
    factor = parse_number(head.substr(0, slash)) / parse_number(head.substr(slash + 1));
  } else {
    factor = parse_number(head);
  }
  if (!tail.empty()) {
    if (tail[0] != '/') throw std::invalid_argument("bad angle token: " + token);
    factor /= parse_number(tail.substr(1));
  }
  return factor * kPi;
}

void ResultTable::add_meta(const std::string& key, const std::string& value) {
  meta.emplace_back(key, value);
}

void ResultTable::add_meta(const std::string& key, double value) {
  meta.emplace_back(key, format_g17(value));
}

TableSection& ResultTable::add_section(const std::string& name, std::vector<std::string> columns) {
  sections.push_back(TableSection{name, std::move(columns), {}});
  return sections.back();
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  out << "# command = " << command << "\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
  for (const TableSection& sec : sections) {
    out << "# section = " << sec.name << "\n";
    for (std::size_t i = 0; i < sec.columns.size(); ++i)
      out << (i ? "," : "") << sec.columns[i];
    out << "\n";
    for (const auto& row : sec.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << format_g17(row[i]);
      out << "\n";
    }
  }
  return out.str();
}

namespace {

void json_escape(std::ostringstream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out << '\\';
    out << c;
  }
  out << '"';
}

}  // namespace

std::string ResultTable::to_json() const {
  std::ostringstream out;
  out << "{\n  \"command\": ";
  json_escape(out, command);
  out << ",\n  \"meta\": {";
  for (std::size_t i = 0; i < meta.size(); ++i) {
    out << (i ? ", " : "");
    json_escape(out, meta[i].first);
    out << ": ";
    json_escape(out, meta[i].second);
  }
  out << "},\n  \"sections\": [";
  for (std::size_t k = 0; k < sections.size(); ++k) {
    const TableSection& sec = sections[k];
    out << (k ? ",\n    {" : "\n    {") << "\"name\": ";
    json_escape(out, sec.name);
    out << ", \"columns\": [";
    for (std::size_t i = 0; i < sec.columns.size(); ++i) {
      out << (i ? ", " : "");
      json_escape(out, sec.columns[i]);
    }
    out << "], \"rows\": [";
    for (std::size_t r = 0; r < sec.rows.size(); ++r) {
      out << (r ? ", [" : "[");
      for (std::size_t i = 0; i < sec.rows[r].size(); ++i)
        out << (i ? ", " : "") << format_g17(sec.rows[r][i]);
      out << "]";
    }
    out << "]}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

ResultTable parse_csv(const std::string& text) {
  ResultTable t;
  std::istringstream in(text);
  std::string line;
  TableSection* cur = nullptr;
  bool expect_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find(" = ");
      if (eq == std::string::npos) throw std::invalid_argument("bad csv meta line: " + line);
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 3);
      if (key == "command") {
        t.command = val;
      } else if (key == "section") {
        t.sections.push_back(TableSection{val, {}, {}});
        cur = &t.sections.back();
        expect_header = true;
      } else {
        t.meta.emplace_back(key, val);
      }
      continue;
    }
    if (cur == nullptr) throw std::invalid_argument("csv data before any section");
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (expect_header) {
      cur->columns = cells;
      expect_header = false;
    } else {
      std::vector<double> row;
      row.reserve(cells.size());
      for (const std::string& c : cells) row.push_back(parse_number(c));
      cur->rows.push_back(std::move(row));
    }
  }
  return t;
}

}  // namespace qwalk
