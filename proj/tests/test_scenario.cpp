#include <gtest/gtest.h>

#include <random>
#include <string>

#include "aoe/grid.hpp"
#include "aoe/scenario.hpp"

using namespace aoe;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "schema_version": 1,
    "world": {"width_m": 10, "height_m": 10},
    "access_points": [{"id": 1, "position": [5, 5], "tx_power_dbm": 20, "model_id": "vit_b_16"}],
    "models": {"vit_b_16": {"flops": 33.6e9, "accuracy": 0.996}}
  })");
}

std::string expect_validation_error(const json& doc) {
  try {
    load_scenario(doc.dump());
  } catch (const validation_error& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected validation_error for " << doc.dump();
  return {};
}

}  // namespace

TEST(LoadScenario, MinimalDocumentFillsDefaults) {
  const Scenario s = load_scenario(minimal_doc().dump());
  EXPECT_EQ(s.grid_cols(), 5u);
  EXPECT_EQ(s.grid_rows(), 5u);
  EXPECT_DOUBLE_EQ(s.pixel_size_m, 2.0);
  EXPECT_DOUBLE_EQ(s.application.deadline_s, 0.5);
  EXPECT_DOUBLE_EQ(s.application.input_bits, 1.0e5);
  EXPECT_DOUBLE_EQ(s.application.effectiveness_threshold, 0.99);
  EXPECT_DOUBLE_EQ(s.radio.noise_figure_db, 7.0);
  EXPECT_DOUBLE_EQ(s.radio.noise_psd_dbm_hz, -174.0);
  EXPECT_DOUBLE_EQ(s.radio.path_loss_exponent, 2.0);
  EXPECT_FALSE(s.radio.reference_loss_db.has_value());
  ASSERT_EQ(s.access_points.size(), 1u);
  EXPECT_DOUBLE_EQ(s.access_points[0].carrier_freq_hz, 3.7e9);
  EXPECT_DOUBLE_EQ(s.access_points[0].bandwidth_hz, 360e3);
  EXPECT_DOUBLE_EQ(s.access_points[0].compute_capacity_flops, 1e12);
}

TEST(LoadScenario, PixelCountRoundsUp) {
  auto doc = minimal_doc();
  doc["world"]["width_m"] = 11;
  doc["world"]["height_m"] = 0.3;
  doc["world"]["pixel_size_m"] = 0.1;
  doc["access_points"][0]["position"] = {0.1, 0.1};
  const Scenario s = load_scenario(doc.dump());
  EXPECT_EQ(s.grid_cols(), 110u);
  EXPECT_EQ(s.grid_rows(), 3u);

  doc["world"]["pixel_size_m"] = 2.0;
  doc["world"]["height_m"] = 1.0;
  EXPECT_EQ(load_scenario(doc.dump()).grid_cols(), 6u);
  EXPECT_EQ(load_scenario(doc.dump()).grid_rows(), 1u);
}

TEST(LoadScenario, ApOutsideBounds) {
  auto doc = minimal_doc();
  doc["access_points"][0]["position"] = {-1, 3};
  EXPECT_NE(expect_validation_error(doc).find("AP outside bounds"), std::string::npos);
}

TEST(LoadScenario, NamesTheViolatedInvariant) {
  auto doc = minimal_doc();
  doc["access_points"][0]["model_id"] = "resnet50";
  EXPECT_NE(expect_validation_error(doc).find("unknown model_id"), std::string::npos);

  doc = minimal_doc();
  doc["models"]["vit_b_16"]["accuracy"] = 1.2;
  EXPECT_NE(expect_validation_error(doc).find("accuracy"), std::string::npos);

  doc = minimal_doc();
  doc["access_points"].push_back(doc["access_points"][0]);
  EXPECT_NE(expect_validation_error(doc).find("duplicate"), std::string::npos);

  doc = minimal_doc();
  doc["obstacles"] = json::array({{{"rect", {4, 1, 3, 2}}, {"kind", "wall"}, {"penetration_loss_db", 3}}});
  EXPECT_NE(expect_validation_error(doc).find("x0 < x1"), std::string::npos);

  doc = minimal_doc();
  doc["application"] = {{"effectiveness_threshold", 1.5}};
  EXPECT_NE(expect_validation_error(doc).find("effectiveness_threshold"), std::string::npos);

  doc = minimal_doc();
  doc["radio"] = {{"path_loss_exponent", 0}};
  EXPECT_NE(expect_validation_error(doc).find("path_loss_exponent"), std::string::npos);

  doc = minimal_doc();
  doc["access_points"][0]["bandwidth_hz"] = -1;
  EXPECT_NE(expect_validation_error(doc).find("bandwidth_hz"), std::string::npos);
}

TEST(LoadScenario, ParseErrors) {
  EXPECT_THROW(load_scenario("{ not json"), parse_error);
  EXPECT_THROW(load_scenario("[]"), parse_error);

  auto doc = minimal_doc();
  doc.erase("schema_version");
  EXPECT_THROW(load_scenario(doc.dump()), parse_error);

  doc = minimal_doc();
  doc["schema_version"] = 2;
  EXPECT_THROW(load_scenario(doc.dump()), parse_error);

  doc = minimal_doc();
  doc["world"]["widht_m"] = 3;
  EXPECT_THROW(load_scenario(doc.dump()), parse_error);

  doc = minimal_doc();
  doc["world"]["width_m"] = "ten";
  EXPECT_THROW(load_scenario(doc.dump()), parse_error);

  doc = minimal_doc();
  doc["obstacles"] = json::array({{{"rect", {0, 0, 1, 1}}, {"kind", "door"}, {"penetration_loss_db", 1}}});
  EXPECT_THROW(load_scenario(doc.dump()), parse_error);
}

TEST(LoadScenario, SortsAccessPointsById) {
  auto doc = minimal_doc();
  auto ap = doc["access_points"][0];
  ap["id"] = 0;
  doc["access_points"].push_back(ap);
  const Scenario s = load_scenario(doc.dump());
  EXPECT_EQ(s.access_points[0].id, 0);
  EXPECT_EQ(s.access_points[1].id, 1);
}

TEST(LoadScenario, DeterministicAndSerializationRoundTrips) {
  const auto text = minimal_doc().dump();
  const Scenario a = load_scenario(text);
  const Scenario b = load_scenario(text);
  EXPECT_EQ(serialize(a), serialize(b));
  EXPECT_EQ(serialize(load_scenario(serialize(a))), serialize(a));
}

TEST(LoadScenario, BundledFactoryScenarioLoads) {
  const Scenario s = load_scenario_file(std::string(AOE_SOURCE_DIR) + "/scenarios/factory.json");
  EXPECT_EQ(s.access_points.size(), 8u);
  EXPECT_EQ(s.grid_cols(), 50u);
  EXPECT_EQ(s.grid_rows(), 30u);
  EXPECT_THROW(load_scenario_file("/nonexistent/scenario.json"), io_error);
}

TEST(ScenarioGrid, MasksOnlyCentersStrictlyInsideBlockingObstacles) {
  Scenario s = load_scenario(minimal_doc().dump());
  s.obstacles.push_back({{2.0, 2.0, 6.0, 4.0}, ObstacleKind::rack, 5.0, true});   // contains (3,3), (5,3)
  s.obstacles.push_back({{6.0, 6.0, 10.0, 10.0}, ObstacleKind::wall, 5.0, false}); // not blocking
  s.obstacles.push_back({{7.0, 0.0, 8.0, 2.0}, ObstacleKind::wall, 5.0, true});   // (7,1) on edge
  const GridMap g = scenario_grid(s);
  std::size_t masked = 0;
  for (std::size_t row = 0; row < g.height_px; ++row) {
    for (std::size_t col = 0; col < g.width_px; ++col) {
      const Point c = s.pixel_center(col, row);
      const bool expect_masked = (c.y == 3.0 && (c.x == 3.0 || c.x == 5.0));
      EXPECT_EQ(!g.valid(g.index(col, row)), expect_masked) << c.x << "," << c.y;
      masked += !g.valid(g.index(col, row));
    }
  }
  EXPECT_EQ(masked, 2u);
}

TEST(ScenarioGrid, RowZeroIsNorth) {
  const Scenario s = load_scenario(minimal_doc().dump());
  EXPECT_DOUBLE_EQ(s.pixel_center(0, 0).x, 1.0);
  EXPECT_DOUBLE_EQ(s.pixel_center(0, 0).y, 9.0);
  EXPECT_DOUBLE_EQ(s.pixel_center(4, 4).y, 1.0);
  EXPECT_DOUBLE_EQ(s.pixel_center(7).x, 5.0);
  EXPECT_DOUBLE_EQ(s.pixel_center(7).y, 7.0);
}

// Mutation fuzzing: whatever survives load_scenario must satisfy every
// invariant and serialize stably.
TEST(LoadScenario, FuzzedDocumentsNeverYieldInvalidScenarios) {
  json base = json::parse(R"({
    "schema_version": 1,
    "world": {"width_m": 20, "height_m": 12, "pixel_size_m": 2},
    "obstacles": [{"rect": [2, 2, 6, 4], "kind": "rack", "penetration_loss_db": 6, "blocks_service": true}],
    "access_points": [
      {"id": 1, "position": [5, 5], "tx_power_dbm": 20, "model_id": "vit_b_16"},
      {"id": 2, "position": [15, 8], "tx_power_dbm": 10, "bandwidth_hz": 1e6, "model_id": "mobilenet_v3"}],
    "models": {"vit_b_16": {"flops": 33.6e9, "accuracy": 0.996},
               "mobilenet_v3": {"flops": 0.11e9, "accuracy": 0.957}},
    "application": {"input_bits": 1e5, "deadline_s": 0.5, "effectiveness_threshold": 0.99},
    "radio": {"path_loss_exponent": 2.5, "reference_loss_db": 40, "noise_figure_db": 7, "noise_psd_dbm_hz": -174}
  })");

  std::mt19937_64 rng(2024);
  const double specials[] = {0.0, -1.0, 1.0, 1.5, -0.001, 1e308, 1e-300, 1e9, 0.5, 25.0};
  std::size_t accepted = 0;
  for (int iter = 0; iter < 3000; ++iter) {
    json doc = base;
    const int mutations = 1 + static_cast<int>(rng() % 3);
    for (int m = 0; m < mutations; ++m) {
      std::vector<json::json_pointer> leaves;
      const json flat = doc.flatten();
      for (const auto& [ptr, v] : flat.items()) leaves.emplace_back(ptr);
      const auto& ptr = leaves[rng() % leaves.size()];
      switch (rng() % 5) {
        case 0: doc[ptr] = specials[rng() % std::size(specials)]; break;
        case 1:
          if (doc[ptr].is_number()) doc[ptr] = doc[ptr].get<double>() * -1.0;
          break;
        case 2: doc[ptr] = "x"; break;
        case 3:
          if (doc[ptr].is_number()) doc[ptr] = doc[ptr].get<double>() * 10.0;
          break;
        case 4: {
          auto& parent = doc[ptr.parent_pointer()];
          if (parent.is_object()) parent.erase(ptr.back());
          break;
        }
      }
    }
    Scenario s;
    try {
      s = load_scenario(doc.dump());
    } catch (const parse_error&) {
      continue;
    } catch (const validation_error&) {
      continue;
    } catch (const std::exception& e) {
      FAIL() << "unexpected exception type: " << e.what() << " for " << doc.dump();
    }
    ++accepted;
    EXPECT_NO_THROW(validate(s)) << doc.dump();
    EXPECT_EQ(serialize(load_scenario(serialize(s))), serialize(s));
  }
  EXPECT_GT(accepted, 100u);
}
