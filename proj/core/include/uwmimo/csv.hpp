#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uwmimo::scenario {

/// Header plus numeric rows. Every row must match the header width and every
/// value must be finite.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<double> row);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column(const std::string& name) const;

  /// Comma separated, '\n' line ends, shortest round-trip decimal numerals.
  void write(std::ostream& out) const;
  std::string to_string() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Locale-independent shortest representation that parses back exactly.
std::string format_number(double value);

}  // namespace uwmimo::scenario
