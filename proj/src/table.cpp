#include "dlab/table.hpp"

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dlab {

std::string formatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("ResultTable: no columns");
}

void ResultTable::addRow(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("ResultTable: row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns_.size()));
  if (!rows_.empty()) {
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c].index() != rows_.front()[c].index())
        throw std::invalid_argument("ResultTable: cell type changes in column " + columns_[c]);
  }
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::columnIndex(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i] == name) return i;
  throw std::out_of_range("ResultTable: no column " + name);
}

double ResultTable::real(std::size_t row, const std::string& column) const {
  const auto& cell = rows_.at(row).at(columnIndex(column));
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  return std::get<double>(cell);
}

std::int64_t ResultTable::integer(std::size_t row, const std::string& column) const {
  return std::get<std::int64_t>(rows_.at(row).at(columnIndex(column)));
}

const std::string& ResultTable::text(std::size_t row, const std::string& column) const {
  return std::get<std::string>(rows_.at(row).at(columnIndex(column)));
}

std::string ResultTable::note(const std::string& key) const {
  for (const auto& [k, v] : provenance_.notes)
    if (k == key) return v;
  return {};
}

namespace {

char typeCode(const Cell& c) { return "ids"[c.index()]; }

std::string renderCell(const Cell& c) {
  switch (c.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(c));
    case 1: return formatReal(std::get<double>(c));
    default: return std::get<std::string>(c);
  }
}

std::vector<std::string> splitComma(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

Cell parseCell(const std::string& text, char type) {
  switch (type) {
    case 'i': {
      std::int64_t v{};
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || p != text.data() + text.size())
        throw std::runtime_error("readCsv: bad integer '" + text + "'");
      return v;
    }
    case 'd': {
      // strtod handles inf/nan spellings produced by %g.
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size())
        throw std::runtime_error("readCsv: bad real '" + text + "'");
      return v;
    }
    case 's': return text;
    default: throw std::runtime_error("readCsv: unknown column type");
  }
}

}  // namespace

void writeCsv(const ResultTable& table, std::ostream& os) {
  const auto& p = table.provenance();
  os << "# tool=dispersion-lab " << p.toolVersion << '\n';
  os << "# config_hash=" << p.configHash << '\n';
  os << "# seed=" << p.seed << '\n';
  for (const auto& [k, v] : p.notes) os << "# " << k << '=' << v << '\n';
  os << "# types=";
  for (std::size_t c = 0; c < table.columns().size(); ++c) {
    if (c) os << ',';
    os << (table.rows().empty() ? 'd' : typeCode(table.rows().front()[c]));
  }
  os << '\n';
  for (std::size_t c = 0; c < table.columns().size(); ++c) {
    if (c) os << ',';
    os << table.columns()[c];
  }
  os << '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << renderCell(row[c]);
    }
    os << '\n';
  }
}

void writeCsv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  writeCsv(table, os);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

ResultTable readCsv(std::istream& is) {
  Provenance prov;
  std::string types;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) != 0) break;
    const auto body = line.substr(2);
    const auto eq = body.find('=');
    if (eq == std::string::npos) continue;
    const auto key = body.substr(0, eq);
    const auto value = body.substr(eq + 1);
    if (key == "tool") {
      const auto space = value.rfind(' ');
      prov.toolVersion = space == std::string::npos ? value : value.substr(space + 1);
    } else if (key == "config_hash") {
      prov.configHash = value;
    } else if (key == "seed") {
      prov.seed = std::stoull(value);
    } else if (key == "types") {
      types = value;
    } else {
      prov.notes.emplace_back(key, value);
    }
  }
  if (line.empty()) throw std::runtime_error("readCsv: missing header");
  ResultTable table(splitComma(line));
  const auto codes = splitComma(types);
  if (codes.size() != table.columns().size())
    throw std::runtime_error("readCsv: types line does not match header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = splitComma(line);
    if (fields.size() != codes.size()) throw std::runtime_error("readCsv: ragged row");
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row.push_back(parseCell(fields[c], codes[c].at(0)));
    table.addRow(std::move(row));
  }
  table.provenance() = std::move(prov);
  return table;
}

ResultTable readCsv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return readCsv(is);
}

std::string stableHash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dlab
