#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlqm::cli {

/// Column-named numeric table; the in-memory form of every CSV the tool reads or writes.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  /// Throws ContractViolation if the column is missing.
  std::vector<double> column(std::string_view name) const;
};

/// Shortest round-trip decimal form; locale independent so output is byte-stable.
std::string format_double(double v);

void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
/// Throws ConfigError on unreadable files and malformed rows.
Table read_csv(const std::filesystem::path& path);

/// Per-column maximum absolute deviation between two tables with aligned "t" columns.
struct ColumnDeviation {
  std::string column;
  double max_abs = 0.0;
};

/// field: a column name, "psi" or "phi" (max 2-norm of the state-vector difference over
/// rows), or "all" (every shared column). Throws ContractViolation when the time columns do
/// not align within 1e-9 (1 + |t|) and ConfigError for unknown fields.
std::vector<ColumnDeviation> compare_tables(const Table& a, const Table& b, std::string_view field);

}  // namespace nlqm::cli
