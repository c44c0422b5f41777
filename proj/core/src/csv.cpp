#include "uwmimo/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "uwmimo/error.hpp"

namespace uwmimo::scenario {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, ptr};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  detail::require(!header_.empty(), "CSV header must be non-empty");
}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CSV row width does not match the header");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i])) {
      throw std::domain_error("non-finite value in CSV column '" + header_[i] + "'");
    }
  }
  rows_.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw std::out_of_range("no CSV column named '" + name + "'");
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::string CsvTable::to_string() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace uwmimo::scenario
