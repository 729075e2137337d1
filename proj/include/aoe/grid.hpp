#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aoe/error.hpp"
#include "aoe/scenario.hpp"

namespace aoe {

inline constexpr double masked_value = std::numeric_limits<double>::quiet_NaN();

// Row-major raster, row 0 at the north edge. Pixels with mask == 0 hold
// masked_value and are skipped by every statistic.
struct GridMap {
  std::size_t width_px = 0;
  std::size_t height_px = 0;
  double pixel_size_m = 1.0;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  std::string unit;

  GridMap() = default;
  GridMap(std::size_t w, std::size_t h, double pixel, std::string unit_label = {})
      : width_px(w), height_px(h), pixel_size_m(pixel), values(w * h, 0.0), mask(w * h, 1),
        unit(std::move(unit_label)) {}

  std::size_t size() const { return values.size(); }
  std::size_t index(std::size_t col, std::size_t row) const { return row * width_px + col; }
  bool valid(std::size_t i) const { return mask[i] != 0; }

  double& at(std::size_t col, std::size_t row) { return values[index(col, row)]; }
  double at(std::size_t col, std::size_t row) const { return values[index(col, row)]; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
  }

  // Same shape and mask, all valid values set to `fill`.
  GridMap like(double fill, std::string unit_label) const {
    GridMap g = *this;
    g.unit = std::move(unit_label);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = g.valid(i) ? fill : masked_value;
    return g;
  }

  bool same_shape(const GridMap& o) const { return width_px == o.width_px && height_px == o.height_px; }
};

// Blank grid for a scenario with obstacle-interior pixels masked out.
inline GridMap scenario_grid(const Scenario& s, std::string unit = {}) {
  GridMap g(s.grid_cols(), s.grid_rows(), s.pixel_size_m, std::move(unit));
  for (std::size_t row = 0; row < g.height_px; ++row) {
    for (std::size_t col = 0; col < g.width_px; ++col) {
      const Point c = s.pixel_center(col, row);
      bool blocked = false;
      for (const auto& o : s.obstacles) blocked = blocked || (o.blocks_service && o.rect.contains_strict(c));
      const std::size_t i = g.index(col, row);
      g.mask[i] = blocked ? 0 : 1;
      if (blocked) g.values[i] = masked_value;
    }
  }
  return g;
}

inline double mean_valid(const GridMap& g) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.valid(i)) continue;
    sum += g.values[i];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// Shortest decimal form that parses back to the identical double.
inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_value(std::string_view cell, std::size_t line, std::size_t column) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  if (cell == "nan") return masked_value;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || std::isnan(v)) {
    throw parse_error("non-numeric cell '" + std::string(cell) + "' at line " + std::to_string(line) +
                      ", column " + std::to_string(column));
  }
  return v;
}

struct CsvGrid {
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major, NaN for `nan` cells
};

// Headerless CSV, one line per grid row. All rows must have the same width.
inline CsvGrid parse_csv_grid(std::istream& in) {
  CsvGrid grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      grid.values.push_back(parse_value(rest.substr(0, comma), line_no, count + 1));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (grid.rows == 0)
      grid.cols = count;
    else if (count != grid.cols)
      throw parse_error("dimension mismatch: line " + std::to_string(line_no) + " has " + std::to_string(count) +
                        " columns, expected " + std::to_string(grid.cols));
    ++grid.rows;
  }
  return grid;
}

inline void write_csv_grid(std::ostream& out, const GridMap& g) {
  for (std::size_t row = 0; row < g.height_px; ++row) {
    for (std::size_t col = 0; col < g.width_px; ++col) {
      const std::size_t i = g.index(col, row);
      if (col) out << ',';
      out << (g.valid(i) ? format_value(g.values[i]) : std::string("nan"));
    }
    out << '\n';
  }
}

}  // namespace aoe
