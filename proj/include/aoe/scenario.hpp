#pragma once

// World model for a connect-compute deployment: floor geometry, access
// points with their hosted inference model, the application's timing and
// quality requirements, and the radio link-budget parameters.
//
// Scenarios are loaded from a versioned JSON document (schema_version 1),
// validated once, and treated as immutable afterwards.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aoe/error.hpp"

namespace aoe {

inline constexpr double speed_of_light_mps = 299792458.0;
inline constexpr int scenario_schema_version = 1;
inline constexpr std::size_t max_grid_pixels = std::size_t{1} << 26;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Axis-aligned rectangle in meters.
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains_strict(Point p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
};

enum class ObstacleKind { wall, rack };

struct Obstacle {
  Rect rect;
  ObstacleKind kind = ObstacleKind::wall;
  double penetration_loss_db = 0.0;  // per traversal
  bool blocks_service = false;       // pixel centers inside are masked out
};

struct AccessPoint {
  int id = 0;
  Point position;
  double tx_power_dbm = 20.0;
  double carrier_freq_hz = 3.7e9;
  double bandwidth_hz = 360e3;
  std::string model_id;
  double compute_capacity_flops = 1e12;  // FLOPS/s available for one service
};

struct InferenceModel {
  std::string id;
  double flops = 0.0;     // per inference
  double accuracy = 0.0;  // in (0, 1]
};

struct Application {
  double input_bits = 1.0e5;
  double deadline_s = 0.5;
  double effectiveness_threshold = 0.99;
};

struct RadioDefaults {
  double path_loss_exponent = 2.0;
  // Loss at 1 m. When absent, free-space loss at each AP's own carrier.
  std::optional<double> reference_loss_db;
  double noise_figure_db = 7.0;
  double noise_psd_dbm_hz = -174.0;
};

struct Scenario {
  double width_m = 0.0;
  double height_m = 0.0;
  double pixel_size_m = 2.0;
  std::vector<Obstacle> obstacles;
  std::vector<AccessPoint> access_points;  // sorted by id
  std::map<std::string, InferenceModel> models;
  Application application;
  RadioDefaults radio;

  std::size_t grid_cols() const { return pixel_count(width_m); }
  std::size_t grid_rows() const { return pixel_count(height_m); }
  std::size_t pixel_total() const { return grid_cols() * grid_rows(); }

  // Row 0 is the northern edge (largest y); the grid is anchored at (0,0).
  Point pixel_center(std::size_t col, std::size_t row) const {
    return {(static_cast<double>(col) + 0.5) * pixel_size_m,
            (static_cast<double>(grid_rows() - row) - 0.5) * pixel_size_m};
  }
  Point pixel_center(std::size_t flat) const {
    return pixel_center(flat % grid_cols(), flat / grid_cols());
  }

  const InferenceModel& model_of(const AccessPoint& ap) const {
    auto it = models.find(ap.model_id);
    if (it == models.end()) throw validation_error("unknown model_id '" + ap.model_id + "'");
    return it->second;
  }

  const AccessPoint& ap_by_id(int id) const {
    for (const auto& ap : access_points)
      if (ap.id == id) return ap;
    throw validation_error("no access point with id " + std::to_string(id));
  }

  std::size_t ap_index(int id) const {
    for (std::size_t i = 0; i < access_points.size(); ++i)
      if (access_points[i].id == id) return i;
    throw validation_error("no access point with id " + std::to_string(id));
  }

private:
  std::size_t pixel_count(double extent) const {
    // The relative nudge keeps 0.3/0.1 at 3 instead of rounding up to 4.
    return static_cast<std::size_t>(std::ceil(extent / pixel_size_m * (1.0 - 1e-12)));
  }
};

// 20 log10(4 pi d f / c) at d = 1 m.
inline double free_space_loss_1m_db(double carrier_freq_hz) {
  return 20.0 * std::log10(4.0 * 3.14159265358979323846 * carrier_freq_hz / speed_of_light_mps);
}

inline double reference_loss_db(const Scenario& s, const AccessPoint& ap) {
  return s.radio.reference_loss_db ? *s.radio.reference_loss_db
                                   : free_space_loss_1m_db(ap.carrier_freq_hz);
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw validation_error(what);
}

inline bool finite(double v) { return std::isfinite(v); }

}  // namespace detail

// Throws validation_error naming the first violated invariant.
inline void validate(const Scenario& s) {
  using detail::finite;
  using detail::require;

  require(finite(s.width_m) && s.width_m > 0, "world.width_m must be > 0");
  require(finite(s.height_m) && s.height_m > 0, "world.height_m must be > 0");
  require(finite(s.pixel_size_m) && s.pixel_size_m > 0, "world.pixel_size_m must be > 0");
  require(s.width_m / s.pixel_size_m <= static_cast<double>(max_grid_pixels) &&
              s.height_m / s.pixel_size_m <= static_cast<double>(max_grid_pixels) &&
              s.pixel_total() <= max_grid_pixels,
          "pixel grid too large");
  require(s.grid_cols() >= 1 && s.grid_rows() >= 1, "pixel grid is empty");

  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const auto& o = s.obstacles[i];
    const std::string tag = "obstacle " + std::to_string(i) + ": ";
    require(finite(o.rect.x0) && finite(o.rect.y0) && finite(o.rect.x1) && finite(o.rect.y1),
            tag + "rect coordinates must be finite");
    require(o.rect.x0 < o.rect.x1 && o.rect.y0 < o.rect.y1, tag + "rect requires x0 < x1 and y0 < y1");
    require(finite(o.penetration_loss_db) && o.penetration_loss_db >= 0,
            tag + "penetration_loss_db must be >= 0");
  }

  for (const auto& [key, m] : s.models) {
    const std::string tag = "model '" + key + "': ";
    require(!key.empty() && key == m.id, tag + "id must match its catalog key");
    require(finite(m.flops) && m.flops > 0, tag + "flops must be > 0");
    require(finite(m.accuracy) && m.accuracy > 0 && m.accuracy <= 1, tag + "accuracy must be in (0, 1]");
  }

  require(!s.access_points.empty(), "scenario needs at least one access point");
  std::set<int> ids;
  for (const auto& ap : s.access_points) {
    const std::string tag = "access point " + std::to_string(ap.id) + ": ";
    require(ids.insert(ap.id).second, tag + "duplicate AP id");
    require(finite(ap.position.x) && finite(ap.position.y) && ap.position.x >= 0 &&
                ap.position.x <= s.width_m && ap.position.y >= 0 && ap.position.y <= s.height_m,
            tag + "AP outside bounds");
    require(finite(ap.tx_power_dbm), tag + "tx_power_dbm must be finite");
    require(finite(ap.carrier_freq_hz) && ap.carrier_freq_hz > 0, tag + "carrier_freq_hz must be > 0");
    require(finite(ap.bandwidth_hz) && ap.bandwidth_hz > 0, tag + "bandwidth_hz must be > 0");
    require(finite(ap.compute_capacity_flops) && ap.compute_capacity_flops > 0,
            tag + "compute_capacity_flops must be > 0");
    require(s.models.count(ap.model_id) == 1, tag + "unknown model_id '" + ap.model_id + "'");
  }

  const auto& app = s.application;
  require(finite(app.input_bits) && app.input_bits > 0, "application.input_bits must be > 0");
  require(finite(app.deadline_s) && app.deadline_s > 0, "application.deadline_s must be > 0");
  require(finite(app.effectiveness_threshold) && app.effectiveness_threshold >= 0 &&
              app.effectiveness_threshold <= 1,
          "application.effectiveness_threshold must be in [0, 1]");

  const auto& r = s.radio;
  require(finite(r.path_loss_exponent) && r.path_loss_exponent > 0, "radio.path_loss_exponent must be > 0");
  require(!r.reference_loss_db || finite(*r.reference_loss_db), "radio.reference_loss_db must be finite");
  require(finite(r.noise_figure_db), "radio.noise_figure_db must be finite");
  require(finite(r.noise_psd_dbm_hz), "radio.noise_psd_dbm_hz must be finite");
}

namespace detail {

using json = nlohmann::json;

// Rejects keys outside `allowed` so that typos do not silently fall back to
// defaults.
inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw parse_error(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw parse_error(where + ": unknown key '" + item.key() + "'");
  }
}

inline double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw parse_error(where + ": missing required key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw parse_error(where + "." + key + " must be a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

inline Point point(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw parse_error(where + ": missing required key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw parse_error(where + "." + key + " must be [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline Obstacle parse_obstacle(const json& j, const std::string& where) {
  check_keys(j, where, {"rect", "kind", "penetration_loss_db", "blocks_service"});
  Obstacle o;
  if (!j.contains("rect")) throw parse_error(where + ": missing required key 'rect'");
  const auto& r = j.at("rect");
  if (!r.is_array() || r.size() != 4) throw parse_error(where + ".rect must be [x0, y0, x1, y1]");
  for (const auto& c : r)
    if (!c.is_number()) throw parse_error(where + ".rect must be [x0, y0, x1, y1]");
  o.rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw parse_error(where + ".kind must be \"wall\" or \"rack\"");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "wall")
    o.kind = ObstacleKind::wall;
  else if (kind == "rack")
    o.kind = ObstacleKind::rack;
  else
    throw parse_error(where + ".kind must be \"wall\" or \"rack\"");
  o.penetration_loss_db = number(j, where, "penetration_loss_db");
  if (j.contains("blocks_service")) {
    if (!j.at("blocks_service").is_boolean()) throw parse_error(where + ".blocks_service must be a boolean");
    o.blocks_service = j.at("blocks_service").get<bool>();
  }
  return o;
}

inline AccessPoint parse_access_point(const json& j, const std::string& where) {
  check_keys(j, where,
             {"id", "position", "tx_power_dbm", "carrier_freq_hz", "bandwidth_hz", "model_id",
              "compute_capacity_flops"});
  AccessPoint ap;
  if (!j.contains("id") || !j.at("id").is_number_integer()) throw parse_error(where + ".id must be an integer");
  const auto id = j.at("id").get<long long>();
  if (id < -1000000 || id > 1000000) throw parse_error(where + ".id out of range");
  ap.id = static_cast<int>(id);
  ap.position = point(j, where, "position");
  ap.tx_power_dbm = number(j, where, "tx_power_dbm");
  ap.carrier_freq_hz = number_or(j, where, "carrier_freq_hz", ap.carrier_freq_hz);
  ap.bandwidth_hz = number_or(j, where, "bandwidth_hz", ap.bandwidth_hz);
  if (!j.contains("model_id") || !j.at("model_id").is_string())
    throw parse_error(where + ".model_id must be a string");
  ap.model_id = j.at("model_id").get<std::string>();
  ap.compute_capacity_flops = number_or(j, where, "compute_capacity_flops", ap.compute_capacity_flops);
  return ap;
}

}  // namespace detail

// Parses and validates a scenario document. Defaults are filled for every
// optional field; access points are returned sorted by id.
inline Scenario load_scenario(std::string_view document) {
  using detail::json;
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("malformed scenario document: ") + e.what());
  }
  detail::check_keys(root, "scenario",
                     {"schema_version", "world", "obstacles", "access_points", "models", "application", "radio"});
  if (!root.contains("schema_version") || !root.at("schema_version").is_number_integer() ||
      root.at("schema_version").get<long long>() != scenario_schema_version)
    throw parse_error("scenario: schema_version must be 1");

  Scenario s;
  if (!root.contains("world")) throw parse_error("scenario: missing required key 'world'");
  const auto& world = root.at("world");
  detail::check_keys(world, "world", {"width_m", "height_m", "pixel_size_m"});
  s.width_m = detail::number(world, "world", "width_m");
  s.height_m = detail::number(world, "world", "height_m");
  s.pixel_size_m = detail::number_or(world, "world", "pixel_size_m", s.pixel_size_m);

  if (root.contains("obstacles")) {
    const auto& obs = root.at("obstacles");
    if (!obs.is_array()) throw parse_error("obstacles must be an array");
    for (std::size_t i = 0; i < obs.size(); ++i)
      s.obstacles.push_back(detail::parse_obstacle(obs[i], "obstacles[" + std::to_string(i) + "]"));
  }

  if (!root.contains("models")) throw parse_error("scenario: missing required key 'models'");
  const auto& models = root.at("models");
  if (!models.is_object()) throw parse_error("models must be an object keyed by model id");
  for (const auto& item : models.items()) {
    const std::string where = "models." + item.key();
    detail::check_keys(item.value(), where, {"flops", "accuracy"});
    InferenceModel m;
    m.id = item.key();
    m.flops = detail::number(item.value(), where, "flops");
    m.accuracy = detail::number(item.value(), where, "accuracy");
    s.models.emplace(m.id, m);
  }

  if (!root.contains("access_points")) throw parse_error("scenario: missing required key 'access_points'");
  const auto& aps = root.at("access_points");
  if (!aps.is_array()) throw parse_error("access_points must be an array");
  for (std::size_t i = 0; i < aps.size(); ++i)
    s.access_points.push_back(detail::parse_access_point(aps[i], "access_points[" + std::to_string(i) + "]"));
  std::stable_sort(s.access_points.begin(), s.access_points.end(),
                   [](const AccessPoint& a, const AccessPoint& b) { return a.id < b.id; });

  if (root.contains("application")) {
    const auto& app = root.at("application");
    detail::check_keys(app, "application", {"input_bits", "deadline_s", "effectiveness_threshold"});
    s.application.input_bits = detail::number_or(app, "application", "input_bits", s.application.input_bits);
    s.application.deadline_s = detail::number_or(app, "application", "deadline_s", s.application.deadline_s);
    s.application.effectiveness_threshold = detail::number_or(
        app, "application", "effectiveness_threshold", s.application.effectiveness_threshold);
  }

  if (root.contains("radio")) {
    const auto& r = root.at("radio");
    detail::check_keys(r, "radio", {"path_loss_exponent", "reference_loss_db", "noise_figure_db", "noise_psd_dbm_hz"});
    s.radio.path_loss_exponent = detail::number_or(r, "radio", "path_loss_exponent", s.radio.path_loss_exponent);
    if (r.contains("reference_loss_db")) s.radio.reference_loss_db = detail::number(r, "radio", "reference_loss_db");
    s.radio.noise_figure_db = detail::number_or(r, "radio", "noise_figure_db", s.radio.noise_figure_db);
    s.radio.noise_psd_dbm_hz = detail::number_or(r, "radio", "noise_psd_dbm_hz", s.radio.noise_psd_dbm_hz);
  }

  validate(s);
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

// Canonical JSON form with every default made explicit. load_scenario of
// the output yields an equal Scenario.
inline nlohmann::json to_json(const Scenario& s) {
  using detail::json;
  json root;
  root["schema_version"] = scenario_schema_version;
  root["world"] = {{"width_m", s.width_m}, {"height_m", s.height_m}, {"pixel_size_m", s.pixel_size_m}};
  root["obstacles"] = json::array();
  for (const auto& o : s.obstacles) {
    root["obstacles"].push_back({{"rect", {o.rect.x0, o.rect.y0, o.rect.x1, o.rect.y1}},
                                 {"kind", o.kind == ObstacleKind::wall ? "wall" : "rack"},
                                 {"penetration_loss_db", o.penetration_loss_db},
                                 {"blocks_service", o.blocks_service}});
  }
  root["access_points"] = json::array();
  for (const auto& ap : s.access_points) {
    root["access_points"].push_back({{"id", ap.id},
                                     {"position", {ap.position.x, ap.position.y}},
                                     {"tx_power_dbm", ap.tx_power_dbm},
                                     {"carrier_freq_hz", ap.carrier_freq_hz},
                                     {"bandwidth_hz", ap.bandwidth_hz},
                                     {"model_id", ap.model_id},
                                     {"compute_capacity_flops", ap.compute_capacity_flops}});
  }
  root["models"] = json::object();
  for (const auto& [id, m] : s.models) root["models"][id] = {{"flops", m.flops}, {"accuracy", m.accuracy}};
  root["application"] = {{"input_bits", s.application.input_bits},
                         {"deadline_s", s.application.deadline_s},
                         {"effectiveness_threshold", s.application.effectiveness_threshold}};
  root["radio"] = {{"path_loss_exponent", s.radio.path_loss_exponent},
                   {"noise_figure_db", s.radio.noise_figure_db},
                   {"noise_psd_dbm_hz", s.radio.noise_psd_dbm_hz}};
  if (s.radio.reference_loss_db) root["radio"]["reference_loss_db"] = *s.radio.reference_loss_db;
  return root;
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(2); }

}  // namespace aoe
