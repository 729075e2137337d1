#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoe/analysis.hpp"
#include "aoe/error.hpp"
#include "aoe/grid.hpp"

namespace aoe {

struct ValueRange {
  double min = 0.0;
  double max = 1.0;
};

namespace detail {

inline std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace detail

inline void export_csv_grid(const GridMap& map, const std::string& path) {
  auto out = detail::open_output(path, std::ios::out | std::ios::binary);
  write_csv_grid(out, map);
  detail::finish(out, path);
}

inline GridMap import_csv_grid(const std::string& path, double pixel_size_m = 1.0) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  const CsvGrid csv = parse_csv_grid(in);
  GridMap g(csv.cols, csv.rows, pixel_size_m);
  for (std::size_t i = 0; i < csv.values.size(); ++i) {
    g.values[i] = csv.values[i];
    g.mask[i] = std::isnan(csv.values[i]) ? 0 : 1;
  }
  return g;
}

// Range of the finite valid values; nullopt when there are none.
inline std::optional<ValueRange> value_range(const GridMap& map) {
  std::optional<ValueRange> r;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double v = map.values[i];
    if (!map.valid(i) || !std::isfinite(v)) continue;
    if (!r)
      r = ValueRange{v, v};
    else
      r = ValueRange{std::min(r->min, v), std::max(r->max, v)};
  }
  return r;
}

// 8-bit gray levels: [min, max] mapped linearly onto [0, 255], values
// outside clamped, masked pixels 0, and a degenerate range (min == max)
// rendered as mid-gray 128.
inline std::vector<std::uint8_t> gray_levels(const GridMap& map, std::optional<ValueRange> range = std::nullopt) {
  const auto r = range ? range : value_range(map);
  std::vector<std::uint8_t> px(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.valid(i)) continue;
    const double v = map.values[i];
    if (!r || !(r->max > r->min)) {
      px[i] = 128;
      continue;
    }
    double t = (v - r->min) / (r->max - r->min);
    if (std::isnan(t)) t = 0.0;
    t = std::clamp(t, 0.0, 1.0);
    px[i] = static_cast<std::uint8_t>(std::lround(t * 255.0));
  }
  return px;
}

// Binary PGM (P5, maxval 255), north row first.
inline void export_pgm(const GridMap& map, const std::string& path, std::optional<ValueRange> range = std::nullopt) {
  const auto px = gray_levels(map, range);
  auto out = detail::open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << map.width_px << ' ' << map.height_px << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  detail::finish(out, path);
}

// Two columns with a header: value, F(value) at each distinct value.
inline void export_ecdf_csv(const Ecdf& cdf, const std::string& path) {
  auto out = detail::open_output(path, std::ios::out | std::ios::binary);
  out << "value,cdf\n";
  for (const auto& [v, f] : cdf.points()) out << format_value(v) << ',' << format_value(f) << '\n';
  detail::finish(out, path);
}

inline void export_text(const std::string& text, const std::string& path) {
  auto out = detail::open_output(path, std::ios::out | std::ios::binary);
  out << text;
  detail::finish(out, path);
}

}  // namespace aoe
