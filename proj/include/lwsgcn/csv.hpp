#pragma once

#include <string>
#include <vector>

#include "lwsgcn/dense.hpp"

namespace lwsgcn {

/// Shortest round-trip decimal form of a double ("%.17g" re-parsed checks
/// are exact); NaN prints as "nan".
std::string format_double(double v);

std::vector<std::string> split_csv_line(const std::string& line);

/// Column-named table of strings with typed access, for reading result
/// CSVs back (asymmetry fitting, tests).
class CsvTable {
 public:
  static CsvTable read_file(const std::string& path);
  static CsvTable from_text(const std::string& text);

  std::size_t num_rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  bool has_column(const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;

  void append_row(std::vector<std::string> row);
  void set_header(std::vector<std::string> header) { header_ = std::move(header); }

 private:
  std::size_t column_index(const std::string& name) const;

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace lwsgcn
