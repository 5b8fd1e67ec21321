#pragma once

#include "conserva/grid.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace conserva {

/// Shortest round-trip representation, '.' decimal separator regardless of locale.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf, end};
}

class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  void add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(std::move(row));
  }

  double number(std::size_t row, std::size_t col) const {
    const Cell& c = rows_.at(row).at(col);
    if (auto d = std::get_if<double>(&c)) return *d;
    if (auto i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("CsvTable: cell is not numeric");
  }

  void write(std::ostream& os) const {
    write_line(os, header_);
    std::vector<std::string> text;
    for (const auto& row : rows_) {
      text.clear();
      for (const auto& c : row) text.push_back(to_text(c));
      write_line(os, text);
    }
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write(os);
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

 private:
  static std::string to_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
  }
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// One row per cell: x[,y], then the q components u0..u{q-1}.
inline CsvTable to_csv(const StateField& u) {
  std::vector<std::string> header;
  const int q = u.components();
  if (u.is_1d()) {
    header.push_back("x");
  } else {
    header.push_back("x");
    header.push_back("y");
  }
  for (int k = 0; k < q; ++k) header.push_back(q == 1 ? "u" : "u" + std::to_string(k));
  CsvTable t(header);
  for (Index c = 0; c < u.cells(); ++c) {
    std::vector<CsvTable::Cell> row;
    if (u.is_1d()) {
      row.emplace_back(u.grid1d().node(c));
    } else {
      const Grid2D& g = u.grid2d();
      row.emplace_back(g.x().node(c / g.my()));
      row.emplace_back(g.y().node(c % g.my()));
    }
    for (int k = 0; k < q; ++k) row.emplace_back(u(c, k));
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace conserva
