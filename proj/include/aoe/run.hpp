#pragma once

// Orchestration behind the `aoe` command-line tool. Each command loads a
// scenario, builds radio grids and per-policy maps, and writes rasters plus
// a summary.json into the output directory. Files are written sequentially
// after all parallel computation has finished.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "aoe/analysis.hpp"
#include "aoe/effectiveness.hpp"
#include "aoe/error.hpp"
#include "aoe/export.hpp"
#include "aoe/grid.hpp"
#include "aoe/monte_carlo.hpp"
#include "aoe/propagation.hpp"
#include "aoe/scenario.hpp"

namespace aoe {

enum class ExportFormat { csv, pgm, both };

enum class ExitCode : int { ok = 0, config = 2, scenario = 3, compute = 4, io = 5 };

struct RssImport {
  int ap_id = 0;
  std::string path;
};

struct RunConfig {
  std::string command = "maps";  // maps | aoe | cdf | plan | validate
  std::string scenario_path;
  std::vector<Policy> policies{Policy::rss, Policy::best_model, Policy::genie};
  std::optional<double> q_th;  // overrides the scenario's threshold
  bool monte_carlo = false;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  ExportFormat format = ExportFormat::both;
  bool exclude_zero_cost = false;
  SearchMode plan_mode = SearchMode::exhaustive;
  std::vector<RssImport> rss_imports;
  bool export_rss = false;
  unsigned threads = 0;
};

inline ExportFormat parse_format(std::string_view s) {
  if (s == "csv") return ExportFormat::csv;
  if (s == "pgm") return ExportFormat::pgm;
  if (s == "both") return ExportFormat::both;
  throw config_error("unknown format '" + std::string(s) + "'");
}

inline std::vector<Policy> parse_policy_selection(std::string_view s) {
  if (s == "all") return {Policy::rss, Policy::best_model, Policy::genie};
  return {parse_policy(s)};
}

inline ExitCode exit_code_for(const error& e) {
  const std::string_view c = e.category();
  if (c == "config") return ExitCode::config;
  if (c == "scenario") return ExitCode::scenario;
  if (c == "compute") return ExitCode::compute;
  return ExitCode::io;
}

namespace detail {

class RunWriter {
public:
  RunWriter(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw io_error("cannot create output directory '" + cfg.out_dir + "'");
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void raster(const GridMap& map, const std::string& stem, std::optional<ValueRange> range = std::nullopt) {
    if (cfg_.format != ExportFormat::pgm) {
      export_csv_grid(map, path(stem + ".csv"));
      written_.push_back(stem + ".csv");
    }
    if (cfg_.format != ExportFormat::csv) {
      export_pgm(map, path(stem + ".pgm"), range);
      written_.push_back(stem + ".pgm");
    }
  }

  void file(const std::string& name) { written_.push_back(name); }
  const std::vector<std::string>& written() const { return written_; }

private:
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

inline std::uint64_t pixel_seed(std::uint64_t seed, std::size_t pixel) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(pixel) + 0x1F123BB5ull));
}

}  // namespace detail

// Executes one command. Errors are reported on `log` and mapped to a
// nonzero exit code; nothing is written for configuration or scenario
// errors.
inline int run(const RunConfig& cfg, std::ostream& log = std::cerr) {
  using nlohmann::json;
  try {
    if (cfg.scenario_path.empty()) throw config_error("--scenario is required");
    if (cfg.monte_carlo && cfg.samples < 1) throw config_error("--samples must be >= 1");
    if (cfg.q_th && !(*cfg.q_th >= 0.0 && *cfg.q_th <= 1.0)) throw config_error("--q-th must lie in [0, 1]");
    if (cfg.policies.empty()) throw config_error("no policy selected");
    const std::string& cmd = cfg.command;
    if (cmd != "maps" && cmd != "aoe" && cmd != "cdf" && cmd != "plan" && cmd != "validate")
      throw config_error("unknown command '" + cmd + "'");

    const Scenario scenario = load_scenario_file(cfg.scenario_path);
    if (cmd == "validate") {
      log << "scenario ok: " << scenario.grid_cols() << "x" << scenario.grid_rows() << " pixels, "
          << scenario.access_points.size() << " access points, " << scenario.models.size() << " models, "
          << scenario.obstacles.size() << " obstacles\n";
      return static_cast<int>(ExitCode::ok);
    }

    const double q_th = cfg.q_th.value_or(scenario.application.effectiveness_threshold);
    RadioGrids grids = build_radio_grids(scenario, cfg.threads);
    for (const auto& imp : cfg.rss_imports) import_rss_grid(imp.path, imp.ap_id, scenario, grids);

    json summary;
    summary["command"] = cmd;
    summary["q_th"] = q_th;
    summary["grid"] = {{"cols", grids.base.width_px},
                       {"rows", grids.base.height_px},
                       {"pixel_size_m", grids.base.pixel_size_m},
                       {"valid_pixels", grids.base.valid_count()}};

    struct PolicyRun {
      Policy policy;
      PolicyMaps maps;
      AoeResult aoe;
    };
    std::vector<PolicyRun> runs;
    for (Policy p : cfg.policies) {
      PolicyMaps maps = build_policy_maps(p, scenario, grids, cfg.threads);
      AoeResult aoe = area_of_effectiveness(maps.effectiveness, q_th);
      runs.push_back({p, std::move(maps), std::move(aoe)});
    }

    std::optional<GridMap> mc_eff, mc_compute, mc_activity;
    std::size_t mc_agree = 0;
    const bool want_mc = cfg.monte_carlo && cmd == "maps";
    const PolicyRun* genie_run = nullptr;
    for (const auto& r : runs)
      if (r.policy == Policy::genie) genie_run = &r;
    if (want_mc && genie_run) {
      mc_eff = grids.base.like(0.0, "probability");
      mc_compute = grids.base.like(0.0, "FLOPS/s");
      mc_activity = grids.base.like(0.0, "s");
      std::vector<std::uint8_t> agree(grids.pixel_count(), 0);
      // Pixels run sequentially; each estimate parallelizes over sample blocks.
      for (std::size_t i = 0; i < grids.pixel_count(); ++i) {
        if (!grids.valid(i)) continue;
        const auto est = genie_oracle_mc(i, grids, scenario, cfg.samples, detail::pixel_seed(cfg.seed, i), cfg.threads);
        mc_eff->values[i] = est.effectiveness;
        mc_compute->values[i] = est.expected_compute_flops;
        mc_activity->values[i] = est.expected_activity_s;
        agree[i] = within_standard_errors(genie_evaluate(i, grids, scenario), est) ? 1 : 0;
      }
      for (auto a : agree) mc_agree += a;
    }

    std::optional<PlacementResult> plan;
    double baseline_fraction = 0.0;
    if (cmd == "plan") {
      plan = placement_search(scenario, grids, all_models_everywhere(scenario), q_th, cfg.plan_mode, cfg.threads);
      Assignment current;
      for (const auto& ap : scenario.access_points) current[ap.id] = ap.model_id;
      baseline_fraction = placement_score(scenario, grids, current, q_th, cfg.threads);
    }

    // All computation done; write files.
    detail::RunWriter out(cfg);
    json policies = json::object();
    for (const auto& r : runs) {
      const std::string name(to_string(r.policy));
      policies[name] = {{"aoe_fraction", r.aoe.fraction},
                        {"aoe_area_m2", r.aoe.area_m2},
                        {"aoe_pixels", r.aoe.pixels},
                        {"mean_effectiveness", mean_valid(r.maps.effectiveness)},
                        {"mean_compute_flops", mean_valid(r.maps.compute_load)},
                        {"mean_activity_s", mean_valid(r.maps.activity)}};
      if (cmd == "maps") {
        out.raster(r.maps.effectiveness, name + "_effectiveness", ValueRange{0.0, 1.0});
        out.raster(r.maps.compute_load, name + "_compute_load");
        out.raster(r.maps.activity, name + "_activity");
      } else if (cmd == "aoe") {
        out.raster(r.aoe.map, "aoe_" + name, ValueRange{0.0, 1.0});
      } else if (cmd == "cdf") {
        json cdfs = json::object();
        for (auto [field, map] : {std::pair<const char*, const GridMap*>{"compute_load", &r.maps.compute_load},
                                  std::pair<const char*, const GridMap*>{"activity", &r.maps.activity}}) {
          const std::string file = "cdf_" + name + "_" + field + ".csv";
          std::size_t n = 0;
          try {
            const Ecdf cdf = ecdf(*map, cfg.exclude_zero_cost);
            export_ecdf_csv(cdf, out.path(file));
            n = cdf.size();
          } catch (const compute_error&) {
            export_text("value,cdf\n", out.path(file));  // every pixel excluded
          }
          out.file(file);
          cdfs[field] = {{"file", file}, {"samples", n}};
        }
        policies[name]["cdf"] = cdfs;
      }
    }
    summary["policies"] = policies;
    summary["exclude_zero_cost"] = cfg.exclude_zero_cost;

    if (mc_eff) {
      out.raster(*mc_eff, "genie_mc_effectiveness", ValueRange{0.0, 1.0});
      out.raster(*mc_compute, "genie_mc_compute_load");
      out.raster(*mc_activity, "genie_mc_activity");
      const double valid = static_cast<double>(grids.base.valid_count());
      summary["monte_carlo"] = {{"samples", cfg.samples},
                                {"seed", cfg.seed},
                                {"pixels_within_3se", mc_agree},
                                {"fraction_within_3se", valid > 0 ? static_cast<double>(mc_agree) / valid : 0.0},
                                {"mean_effectiveness", mean_valid(*mc_eff)},
                                {"mean_compute_flops", mean_valid(*mc_compute)},
                                {"mean_activity_s", mean_valid(*mc_activity)}};
    }

    if (cmd == "maps" && cfg.export_rss) {
      for (std::size_t a = 0; a < grids.ap_count(); ++a) {
        const std::string stem = "rss_ap" + std::to_string(grids.ap_ids[a]);
        export_csv_grid(grids.rss_dbm[a], out.path(stem + ".csv"));
        out.file(stem + ".csv");
      }
    }

    if (plan) {
      json assignment = json::object();
      for (const auto& [ap, model] : plan->assignment) assignment[std::to_string(ap)] = model;
      summary["plan"] = {{"mode", cfg.plan_mode == SearchMode::exhaustive ? "exhaustive" : "greedy"},
                         {"assignment", assignment},
                         {"aoe_fraction", plan->fraction},
                         {"baseline_aoe_fraction", baseline_fraction},
                         {"evaluated", plan->evaluated}};
    }

    summary["files"] = out.written();
    export_text(summary.dump(2) + "\n", out.path("summary.json"));
    log << cmd << ": wrote " << out.written().size() + 1 << " files to " << cfg.out_dir << "\n";
    return static_cast<int>(ExitCode::ok);
  } catch (const error& e) {
    log << "error [" << e.category() << "]: " << e.what() << "\n";
    return static_cast<int>(exit_code_for(e));
  } catch (const std::exception& e) {
    log << "error [compute]: " << e.what() << "\n";
    return static_cast<int>(ExitCode::compute);
  }
}

}  // namespace aoe
