// aoe: goal-oriented coverage maps for edge inference deployments.
//
//   aoe maps     --scenario s.json [--policy all] [--mc --samples N --seed S]
//   aoe aoe      --scenario s.json --q-th 0.99 --policy genie
//   aoe cdf      --scenario s.json [--exclude-zero-cost]
//   aoe plan     --scenario s.json [--mode exhaustive|greedy]
//   aoe validate --scenario s.json
//
// AOE_THREADS caps the worker threads (default: all cores).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoe/run.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string policy = "all";
  std::optional<double> q_th;
  bool mc = false;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string format = "both";
  bool exclude_zero_cost = false;
  std::string mode = "exhaustive";
  std::vector<std::string> rss_imports;
  bool export_rss = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
  sub->add_option("--policy", f.policy, "rss | best_model | genie | all");
  sub->add_option("--q-th", f.q_th, "Effectiveness threshold override, in [0, 1]");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--format", f.format, "csv | pgm | both");
  sub->add_option("--rss-import", f.rss_imports, "Replace an AP's RSS grid: <ap_id>=<csv path>");
}

aoe::RunConfig to_config(const std::string& command, const Flags& f) {
  aoe::RunConfig cfg;
  cfg.command = command;
  cfg.scenario_path = f.scenario;
  cfg.policies = aoe::parse_policy_selection(f.policy);
  cfg.q_th = f.q_th;
  cfg.monte_carlo = f.mc;
  cfg.samples = f.samples;
  cfg.seed = f.seed;
  cfg.out_dir = f.out;
  cfg.format = aoe::parse_format(f.format);
  cfg.exclude_zero_cost = f.exclude_zero_cost;
  if (f.mode == "exhaustive")
    cfg.plan_mode = aoe::SearchMode::exhaustive;
  else if (f.mode == "greedy")
    cfg.plan_mode = aoe::SearchMode::greedy;
  else
    throw aoe::config_error("unknown search mode '" + f.mode + "'");
  for (const auto& spec : f.rss_imports) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw aoe::config_error("--rss-import expects <ap_id>=<path>, got '" + spec + "'");
    try {
      cfg.rss_imports.push_back({std::stoi(spec.substr(0, eq)), spec.substr(eq + 1)});
    } catch (const std::exception&) {
      throw aoe::config_error("--rss-import: bad AP id in '" + spec + "'");
    }
  }
  cfg.export_rss = f.export_rss;
  cfg.threads = aoe::threads_from_env();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Area-of-effectiveness coverage planner"};
  app.require_subcommand(1);
  Flags f;

  auto* maps = app.add_subcommand("maps", "Effectiveness, compute-load and activity maps per policy");
  add_common(maps, f);
  maps->add_flag("--mc", f.mc, "Also estimate genie maps by Monte Carlo");
  maps->add_option("--samples", f.samples, "Monte Carlo samples per pixel");
  maps->add_option("--seed", f.seed, "Monte Carlo seed");
  maps->add_flag("--export-rss", f.export_rss, "Write per-AP RSS grids as CSV");

  auto* aoe_cmd = app.add_subcommand("aoe", "Binary area-of-effectiveness maps");
  add_common(aoe_cmd, f);

  auto* cdf = app.add_subcommand("cdf", "ECDFs of compute load and AP activity");
  add_common(cdf, f);
  cdf->add_flag("--exclude-zero-cost", f.exclude_zero_cost, "Drop zero-cost pixels from the ECDFs");

  auto* plan = app.add_subcommand("plan", "Search model-to-AP placements for the largest genie AoE");
  add_common(plan, f);
  plan->add_option("--mode", f.mode, "exhaustive | greedy");

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", f.scenario, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return static_cast<int>(aoe::ExitCode::config);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return aoe::run(to_config(command, f));
  } catch (const aoe::error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
    return static_cast<int>(aoe::exit_code_for(e));
  }
}
