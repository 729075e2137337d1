#pragma once

// Parametric indoor propagation: log-distance path loss plus per-obstacle
// penetration loss found by casting the AP-to-pixel segment against every
// obstacle rectangle. Capacity follows from the Shannon formula over the
// AP bandwidth with a thermal noise floor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "aoe/error.hpp"
#include "aoe/grid.hpp"
#include "aoe/parallel.hpp"
#include "aoe/scenario.hpp"

namespace aoe {

// 1 if the open segment a-b passes through the interior of `r` over a
// stretch of positive length, else 0. A rectangle is convex, so a segment
// enters it at most once; an endpoint strictly inside counts as that entry.
// Rectangles are open: grazing an edge or touching a corner counts 0.
inline int rect_crossings(Point a, Point b, const Rect& r) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (dx == 0.0 && dy == 0.0) return 0;

  double lo = 0.0, hi = 1.0;
  auto clip = [&](double origin, double delta, double low, double high) {
    if (delta == 0.0) {
      if (!(origin > low && origin < high)) hi = -1.0;
      return;
    }
    double t0 = (low - origin) / delta;
    double t1 = (high - origin) / delta;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
  };
  clip(a.x, dx, r.x0, r.x1);
  clip(a.y, dy, r.y0, r.y1);
  return lo < hi ? 1 : 0;
}

inline std::vector<int> obstacle_crossings(Point a, Point b, std::span<const Obstacle> obstacles) {
  std::vector<int> counts(obstacles.size(), 0);
  for (std::size_t i = 0; i < obstacles.size(); ++i) counts[i] = rect_crossings(a, b, obstacles[i].rect);
  return counts;
}

inline double penetration_loss_db(Point a, Point b, std::span<const Obstacle> obstacles) {
  double loss = 0.0;
  for (const auto& o : obstacles) loss += rect_crossings(a, b, o.rect) * o.penetration_loss_db;
  return loss;
}

// Log-distance model; distance clamped to 1 m below.
inline double path_loss_db(const AccessPoint& ap, Point p, const Scenario& s) {
  const double d = std::max(distance(ap.position, p), 1.0);
  return reference_loss_db(s, ap) + 10.0 * s.radio.path_loss_exponent * std::log10(d) +
         penetration_loss_db(ap.position, p, s.obstacles);
}

inline double rss_dbm(const AccessPoint& ap, Point p, const Scenario& s) {
  return ap.tx_power_dbm - path_loss_db(ap, p, s);
}

inline double noise_floor_dbm(double bandwidth_hz, const RadioDefaults& radio) {
  return radio.noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + radio.noise_figure_db;
}

inline double shannon_capacity_bps(double bandwidth_hz, double snr_linear) {
  return bandwidth_hz * std::log1p(snr_linear) / std::log(2.0);
}

inline double capacity_from_rss(double rss, double bandwidth_hz, const RadioDefaults& radio) {
  if (std::isnan(rss) || rss == -std::numeric_limits<double>::infinity()) return 0.0;
  const double snr_db = rss - noise_floor_dbm(bandwidth_hz, radio);
  return shannon_capacity_bps(bandwidth_hz, std::pow(10.0, snr_db / 10.0));
}

inline double capacity_bps(const AccessPoint& ap, Point p, const Scenario& s) {
  return capacity_from_rss(rss_dbm(ap, p, s), ap.bandwidth_hz, s.radio);
}

// Per-AP RSS and capacity rasters over the scenario grid, indexed in the
// scenario's AP order (ascending id). All grids share one mask.
struct RadioGrids {
  std::vector<int> ap_ids;
  std::vector<GridMap> rss_dbm;
  std::vector<GridMap> capacity_bps;
  GridMap base;  // mask carrier, values unused

  std::size_t ap_count() const { return ap_ids.size(); }
  std::size_t pixel_count() const { return base.size(); }
  bool valid(std::size_t pixel) const { return base.valid(pixel); }

  std::size_t index_of(int ap_id) const {
    for (std::size_t i = 0; i < ap_ids.size(); ++i)
      if (ap_ids[i] == ap_id) return i;
    throw validation_error("no radio grid for access point " + std::to_string(ap_id));
  }
};

inline RadioGrids build_radio_grids(const Scenario& s, unsigned threads = 0) {
  RadioGrids g;
  g.base = scenario_grid(s);
  for (const auto& ap : s.access_points) {
    g.ap_ids.push_back(ap.id);
    g.rss_dbm.push_back(g.base.like(0.0, "dBm"));
    g.capacity_bps.push_back(g.base.like(0.0, "bit/s"));
  }
  parallel_for(g.base.size(), threads, [&](std::size_t i) {
    if (!g.base.valid(i)) return;
    const Point p = s.pixel_center(i);
    for (std::size_t a = 0; a < s.access_points.size(); ++a) {
      const auto& ap = s.access_points[a];
      const double rss = rss_dbm(ap, p, s);
      g.rss_dbm[a].values[i] = rss;
      g.capacity_bps[a].values[i] = capacity_from_rss(rss, ap.bandwidth_hz, s.radio);
    }
  });
  return g;
}

// Replaces one AP's RSS grid with externally computed values (headerless
// CSV, north row first) and recomputes its capacity. Cells over masked
// pixels are ignored; a `nan` cell over a valid pixel means no signal.
inline void import_rss_grid(std::istream& in, int ap_id, const Scenario& s, RadioGrids& grids) {
  const std::size_t a = grids.index_of(ap_id);
  const CsvGrid csv = parse_csv_grid(in);
  if (csv.cols != grids.base.width_px || csv.rows != grids.base.height_px) {
    throw parse_error("dimension mismatch: RSS grid is " + std::to_string(csv.cols) + "x" + std::to_string(csv.rows) +
                      ", scenario grid is " + std::to_string(grids.base.width_px) + "x" +
                      std::to_string(grids.base.height_px));
  }
  const auto& ap = s.ap_by_id(ap_id);
  for (std::size_t i = 0; i < csv.values.size(); ++i) {
    if (!grids.base.valid(i)) continue;
    double rss = csv.values[i];
    if (std::isnan(rss)) rss = -std::numeric_limits<double>::infinity();
    grids.rss_dbm[a].values[i] = rss;
    grids.capacity_bps[a].values[i] = capacity_from_rss(rss, ap.bandwidth_hz, s.radio);
  }
}

inline void import_rss_grid(const std::string& path, int ap_id, const Scenario& s, RadioGrids& grids) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open RSS grid '" + path + "'");
  import_rss_grid(in, ap_id, s, grids);
}

}  // namespace aoe
