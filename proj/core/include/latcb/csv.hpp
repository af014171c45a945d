#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latcb {

/// Shortest round-trip decimal form; identical bits give identical text.
std::string format_double(double value);

/// Gnuplot-friendly CSV: '#' comment lines, one header line, numeric rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_comment(const std::string& line);
  void add_row(const std::vector<double>& row);
  /// Row whose last column is text (e.g. a label).
  void add_row(const std::vector<double>& row, const std::string& tail);

  std::size_t rows() const { return rows_.size(); }
  void write(std::ostream& os) const;
  /// Writes to a temporary sibling and renames it into place.
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::string> rows_;
};

/// Atomic text file write (temporary file plus rename).
void write_text_file(const std::string& path, const std::string& content);

}  // namespace latcb
