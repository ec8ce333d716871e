#include "nlqm/cli/table.hpp"

#include "nlqm/cli/config.hpp"
#include "nlqm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace nlqm::cli {

std::optional<std::size_t> Table::column_index(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(std::string_view name) const {
  const auto idx = column_index(name);
  if (!idx) throw ContractViolation("table has no column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[*idx]);
  return out;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 so sign-of-zero noise cannot change the bytes
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_csv(out, table);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV file '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty CSV");
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    t.columns.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number");
      row.push_back(v);
      p = comma + 1;
    }
    if (row.size() != t.columns.size())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(t.columns.size()) + " fields");
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::vector<std::size_t> state_columns(const Table& t, std::string_view prefix) {
  std::vector<std::size_t> out;
  const std::string re = "Re_" + std::string(prefix) + "_";
  const std::string im = "Im_" + std::string(prefix) + "_";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (t.columns[c].starts_with(re) || t.columns[c].starts_with(im)) out.push_back(c);
  return out;
}

}  // namespace

std::vector<ColumnDeviation> compare_tables(const Table& a, const Table& b,
                                            std::string_view field) {
  const auto ta = a.column_index("t");
  const auto tb = b.column_index("t");
  if (!ta || !tb) throw ContractViolation("compare: both tables need a 't' column");
  if (a.rows.size() != b.rows.size())
    throw ContractViolation("compare: sample counts differ (" + std::to_string(a.rows.size()) +
                            " vs " + std::to_string(b.rows.size()) + ")");
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    const double x = a.rows[r][*ta];
    const double y = b.rows[r][*tb];
    if (std::abs(x - y) > 1e-9 * (1.0 + std::abs(x)))
      throw ContractViolation("compare: sample times differ at row " + std::to_string(r) + " (" +
                              format_double(x) + " vs " + format_double(y) + ")");
  }

  std::vector<ColumnDeviation> out;
  if (field == "psi" || field == "phi") {
    const auto ca = state_columns(a, field);
    const auto cb = state_columns(b, field);
    if (ca.empty() || ca.size() != cb.size())
      throw ConfigError("compare: '" + std::string(field) +
                        "' columns missing or of different dimension");
    for (std::size_t k = 0; k < ca.size(); ++k)
      if (a.columns[ca[k]] != b.columns[cb[k]])
        throw ConfigError("compare: state column layout differs");
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      double sq = 0.0;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        const double d = a.rows[r][ca[k]] - b.rows[r][cb[k]];
        sq += d * d;
      }
      worst = std::max(worst, std::sqrt(sq));
    }
    out.push_back({std::string(field), worst});
    return out;
  }

  std::vector<std::string> names;
  if (field == "all") {
    for (const auto& c : a.columns)
      if (c != "t" && b.column_index(c)) names.push_back(c);
  } else {
    if (!a.column_index(field) || !b.column_index(field))
      throw ConfigError("compare: unknown field '" + std::string(field) + "'");
    names.emplace_back(field);
  }
  for (const auto& name : names) {
    const auto ia = *a.column_index(name);
    const auto ib = *b.column_index(name);
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
      worst = std::max(worst, std::abs(a.rows[r][ia] - b.rows[r][ib]));
    out.push_back({name, worst});
  }
  return out;
}

}  // namespace nlqm::cli
