#include "lwsgcn/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lwsgcn/errors.hpp"

namespace lwsgcn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  // Find the shortest precision that round-trips exactly.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingFile("cannot open CSV: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

CsvTable CsvTable::from_text(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (t.header_.empty()) {
      t.header_ = split_csv_line(line);
    } else {
      auto cells = split_csv_line(line);
      if (cells.size() != t.header_.size()) {
        throw MalformedLine("CSV row has wrong number of columns", line_no);
      }
      t.rows_.push_back(std::move(cells));
    }
  }
  return t;
}

bool CsvTable::has_column(const std::string& name) const {
  for (const std::string& h : header_) {
    if (h == name) return true;
  }
  return false;
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw Error("CSV has no column named '" + name + "'");
}

const std::string& CsvTable::cell(std::size_t row, const std::string& column) const {
  return rows_.at(row)[column_index(column)];
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  const std::string& s = cell(row, column);
  if (s.empty()) return std::nan("");
  return std::strtod(s.c_str(), nullptr);
}

void CsvTable::append_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error("CSV row width does not match header");
  }
  rows_.push_back(std::move(row));
}

}  // namespace lwsgcn
