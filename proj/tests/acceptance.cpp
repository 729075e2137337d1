// Acceptance suite. Usage: aoe_acceptance <path-to-aoe-cli> <scratch-dir>
// Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aoe/aoe.hpp"
#include "support/geometry_oracle.hpp"
#include "support/properties.hpp"
#include "support/random_scenario.hpp"

using namespace aoe;
namespace fs = std::filesystem;

namespace {

const std::string factory_path = std::string(AOE_SOURCE_DIR) + "/scenarios/factory.json";

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

Verdict constants_fidelity() {
  const Scenario s = load_scenario_file(factory_path);
  Verdict v;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) {
      v.pass = false;
      v.detail += what + "; ";
    }
  };
  const std::pair<const char*, std::pair<double, double>> catalog[] = {{"mobilenet_v3", {0.11e9, 0.957}},
                                                                       {"resnet50", {8.17e9, 0.9858}},
                                                                       {"resnet101", {15.5e9, 0.989}},
                                                                       {"vit_b_16", {33.6e9, 0.996}}};
  check(s.models.size() == 4, "catalog size");
  for (const auto& [name, fa] : catalog) {
    auto it = s.models.find(name);
    check(it != s.models.end() && it->second.flops == fa.first && it->second.accuracy == fa.second,
          std::string("model ") + name);
  }
  check(s.application.deadline_s == 0.5, "deadline");
  check(s.application.effectiveness_threshold == 0.99, "threshold");
  check(s.pixel_size_m == 2.0, "pixel size");
  check(s.access_points.size() == 8, "AP count");
  for (const auto& ap : s.access_points) {
    check(ap.compute_capacity_flops == 1e12, "capacity of AP " + std::to_string(ap.id));
    check(ap.bandwidth_hz == 360e3, "bandwidth of AP " + std::to_string(ap.id));
    check(ap.carrier_freq_hz == 3.7e9, "carrier of AP " + std::to_string(ap.id));
  }
  check(s.ap_by_id(1).model_id == "vit_b_16", "AP 1 model");
  bool has_mobilenet = false;
  for (const auto& ap : s.access_points) has_mobilenet |= ap.model_id == "mobilenet_v3";
  check(has_mobilenet, "no MobileNet AP");
  if (v.pass) v.detail = "catalog, deadline, capacity, bandwidth, carrier, pixel size and threshold match";
  return v;
}

Verdict delay_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  const double deadline = 0.5;
  double worst = 0.0;
  std::size_t checked = 0;
  while (checked < 1000) {
    const double bits = log_uniform(1e3, 1e7);
    const double rate = log_uniform(1e5, 1e9);
    const double flops = log_uniform(1e7, 1e11);
    const double tx = transmission_delay(bits, rate);
    const auto f = required_compute(flops, deadline, tx);
    if (!f) continue;  // deadline already spent on transmission
    worst = std::max(worst, rel_err(loop_delay(bits, rate, flops, *f), deadline));
    ++checked;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0, "max rel err " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Verdict shannon() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> db(-30.0, 60.0);
  const double bandwidth = 360e3;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double snr = std::pow(10.0, db(rng) / 10.0);
    const double want = bandwidth * std::log2(1.0 + snr);
    worst = std::max(worst, rel_err(shannon_capacity_bps(bandwidth, snr), want));
  }
  const double unit = rel_err(shannon_capacity_bps(bandwidth, 1.0), bandwidth);
  return {worst <= 1e-9 && unit <= 1e-9, "max rel err " + fmt(worst) + ", C(1)/B - 1 = " + fmt(unit)};
}

Verdict policy_dominance() {
  const auto t0 = Clock::now();
  testkit::PolicyViolations sum;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Scenario s = testkit::random_scenario(seed, {40, 40, 8, 6});
    const RadioGrids g = build_radio_grids(s);
    const auto v = testkit::check_policy_invariants(s, g);
    sum.genie_below_static += v.genie_below_static;
    sum.best_model_not_two_valued += v.best_model_not_two_valued;
    sum.rss_activity_not_minimal += v.rss_activity_not_minimal;
    sum.genie_compute_above_best += v.genie_compute_above_best;
    sum.aoe_not_nested += v.aoe_not_nested;
    sum.pixels += v.pixels;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << sum.pixels << " pixels; violations a=" << sum.genie_below_static << " b=" << sum.best_model_not_two_valued
    << " c=" << sum.rss_activity_not_minimal << " d=" << sum.genie_compute_above_best << " e=" << sum.aoe_not_nested
    << "; " << fmt(secs) << " s";
  return {sum.total() == 0 && secs < 60.0, d.str()};
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  Scenario s = testkit::random_scenario(31337, {10, 10, 6, 3});
  s.width_m = s.height_m = 20.0;  // exactly 10 x 10 pixels
  validate(s);
  const RadioGrids g = build_radio_grids(s);
  std::size_t valid = 0, agree = 0;
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    if (!g.valid(i)) continue;
    ++valid;
    const auto est = genie_oracle_mc(i, g, s, 100000, 7000 + i);
    agree += within_standard_errors(genie_evaluate(i, g, s), est);
  }
  const double secs = seconds_since(t0);
  const double frac = valid ? static_cast<double>(agree) / static_cast<double>(valid) : 0.0;
  return {valid > 0 && frac >= 0.99 && secs < 30.0,
          std::to_string(agree) + "/" + std::to_string(valid) + " pixels within 3 SE, " + fmt(secs) + " s"};
}

Verdict aoe_gain() {
  const auto t0 = Clock::now();
  const Scenario s = load_scenario_file(factory_path);
  const RadioGrids g = build_radio_grids(s);
  const double q = 0.99;
  const auto genie = area_of_effectiveness(build_policy_maps(Policy::genie, s, g).effectiveness, q);
  const auto best = area_of_effectiveness(build_policy_maps(Policy::best_model, s, g).effectiveness, q);
  const auto rss = area_of_effectiveness(build_policy_maps(Policy::rss, s, g).effectiveness, q);
  std::size_t best_outside = 0, rss_outside = 0;
  for (std::size_t i = 0; i < g.pixel_count(); ++i) {
    if (!g.valid(i)) continue;
    best_outside += best.map.values[i] == 1.0 && genie.map.values[i] != 1.0;
    rss_outside += rss.map.values[i] == 1.0 && genie.map.values[i] != 1.0;
  }
  const double secs = seconds_since(t0);
  const bool ok = best_outside == 0 && rss_outside == 0 && genie.pixels > best.pixels && genie.pixels > rss.pixels &&
                  secs < 10.0;
  return {ok, "AoE m2 genie=" + fmt(genie.area_m2) + " best_model=" + fmt(best.area_m2) + " rss=" + fmt(rss.area_m2) +
                  "; " + fmt(secs) + " s"};
}

Verdict mean_orderings() {
  const Scenario s = load_scenario_file(factory_path);
  const RadioGrids g = build_radio_grids(s);
  const auto genie = build_policy_maps(Policy::genie, s, g);
  const auto rss = build_policy_maps(Policy::rss, s, g);
  const auto best = build_policy_maps(Policy::best_model, s, g);
  const double cg = mean_valid(genie.compute_load), cr = mean_valid(rss.compute_load), cb = mean_valid(best.compute_load);
  const double ag = mean_valid(genie.activity), ar = mean_valid(rss.activity), ab = mean_valid(best.activity);
  return {cg < cr && cr < cb && ar < ag && ag < ab,
          "compute genie=" + fmt(cg) + " rss=" + fmt(cr) + " best_model=" + fmt(cb) + "; activity rss=" + fmt(ar) +
              " genie=" + fmt(ag) + " best_model=" + fmt(ab)};
}

Verdict determinism(const std::string& cli, const fs::path& scratch) {
  const fs::path a = scratch / "threads_1", b = scratch / "threads_3";
  fs::remove_all(a);
  fs::remove_all(b);
  auto invoke = [&](const fs::path& out, int threads) {
    const std::string cmd = "AOE_THREADS=" + std::to_string(threads) + " \"" + cli + "\" maps --scenario \"" +
                            factory_path + "\" --policy all --mc --samples 500 --seed 11 --out \"" + out.string() +
                            "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (invoke(a, 1) != 0 || invoke(b, 3) != 0) return {false, "CLI run failed"};
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++files_b;
  return {files > 0 && differ == 0 && files == files_b,
          std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

Verdict geometry_oracle() {
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::size_t disagree = 0;
  for (int i = 0; i < 1000; ++i) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const Obstacle o{{x0, y0, x1, y1}, ObstacleKind::wall, 1.0, false};
    const int got = obstacle_crossings(a, b, std::span<const Obstacle>(&o, 1))[0];
    disagree += got != testkit::sampled_crossings(a, b, o.rect, 100000);
  }
  return {disagree == 0, "1000 pairs, " + std::to_string(disagree) + " disagreements"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: aoe_acceptance <aoe-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];
  fs::create_directories(scratch);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"constants fidelity", constants_fidelity},
      {"loop-delay identity", delay_identity},
      {"Shannon capacity", shannon},
      {"policy dominance", policy_dominance},
      {"oracle equivalence", oracle_equivalence},
      {"AoE gain of genie association", aoe_gain},
      {"mean compute and activity orderings", mean_orderings},
      {"determinism across thread counts", [&] { return determinism(cli, scratch); }},
      {"geometry oracle", geometry_oracle},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << k + 1 << ". " << criteria[k].first << " (" << v.detail << ")"
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
