#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dlab {

inline constexpr const char* kToolVersion = "0.3.0";

using Cell = std::variant<std::int64_t, double, std::string>;

/// Shortest-exact "%.17g" rendering used for every real written to disk.
std::string formatReal(double v);

struct Provenance {
  std::string configHash;
  std::uint64_t seed = 0;
  std::string toolVersion = kToolVersion;
  /// Additional `# key=value` lines (fit summaries and the like).
  std::vector<std::pair<std::string, std::string>> notes;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Column-major-by-name, row-major-by-storage table with a provenance block.
class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t rowCount() const { return rows_.size(); }

  void addRow(std::vector<Cell> row);
  std::size_t columnIndex(const std::string& name) const;

  double real(std::size_t row, const std::string& column) const;
  std::int64_t integer(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;

  Provenance& provenance() { return provenance_; }
  const Provenance& provenance() const { return provenance_; }
  /// Value of a provenance note, empty if absent.
  std::string note(const std::string& key) const;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  Provenance provenance_;
};

// File layout: `# key=value` provenance lines (including a `types=` line
// with one of i/d/s per column), the header, then LF-terminated rows.
void writeCsv(const ResultTable& table, std::ostream& os);
void writeCsv(const ResultTable& table, const std::filesystem::path& path);
ResultTable readCsv(std::istream& is);
ResultTable readCsv(const std::filesystem::path& path);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string stableHash(const std::string& text);

}  // namespace dlab
