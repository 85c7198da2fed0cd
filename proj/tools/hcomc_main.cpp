// hcomc: on-ramp merging simulator front end.
//
//   hcomc run --condition condition1 --controller hcomc --seed 3 --out out/
//   hcomc grid --condition all --controller hcomc,fifo --seed 1:10 --out out/
//   hcomc compare-optimizers --condition 1 --seed 1:10 --out out/
//   hcomc validate-config --config my.json
//
// Every flag can also come from an HCOMC_* environment variable (flag wins).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hcomc/config.hpp"
#include "hcomc/experiment.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kCollision = 2, kInternal = 3 };

struct Options {
  std::string config;
  std::string out = ".";
  std::string seed;
  std::string controller;
  std::string optimizer;
  std::string condition;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') {
    throw hcomc::ConfigError("seed: '" + s + "' is not a non-negative integer");
  }
  return v;
}

// "7", "1,4,9" or "1:10" (inclusive).
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(s, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      seeds.push_back(parse_u64(part));
      continue;
    }
    const auto lo = parse_u64(part.substr(0, colon));
    const auto hi = parse_u64(part.substr(colon + 1));
    if (hi < lo) throw hcomc::ConfigError("seed: empty range '" + part + "'");
    for (auto v = lo; v <= hi; ++v) seeds.push_back(v);
  }
  if (seeds.empty()) throw hcomc::ConfigError("seed: no seeds given");
  return seeds;
}

// Condition preset or config file, then flag overrides.
hcomc::ScenarioConfig base_config(const Options& o, const std::string& condition) {
  hcomc::ScenarioConfig cfg;
  if (!condition.empty()) {
    cfg = hcomc::load_preset(condition);
  } else if (!o.config.empty()) {
    cfg = hcomc::load_config(o.config);
  }
  if (!o.controller.empty()) cfg.controller = hcomc::parse_controller(o.controller);
  if (!o.optimizer.empty()) cfg.optimizer = hcomc::parse_optimizer(o.optimizer);
  if (!o.seed.empty()) {
    cfg.seed = parse_u64(o.seed);
    cfg.ga.seed = cfg.seed;
  }
  return cfg;
}

int run_single(const Options& o) {
  if (o.config.empty() && o.condition.empty()) {
    throw hcomc::ConfigError("run: give --config or --condition");
  }
  if (!o.config.empty() && !o.condition.empty()) {
    throw hcomc::ConfigError("run: --config and --condition are exclusive");
  }
  const auto cfg = base_config(o, o.condition);
  hcomc::ensure_writable_dir(o.out);
  const auto cell = hcomc::run_cell(cfg, o.out);
  std::ofstream f(std::filesystem::path(o.out) / "metrics.csv");
  hcomc::write_metrics_header(f);
  hcomc::write_metrics_row(f, cell);
  hcomc::write_metrics_header(std::cout);
  hcomc::write_metrics_row(std::cout, cell);
  if (cell.forced_stop) std::cerr << "note: VR was forced to stop at the ramp end\n";
  return cell.collision ? kCollision : kOk;
}

int run_grid(const Options& o) {
  std::vector<std::string> conditions;
  if (o.condition.empty() || o.condition == "all") {
    conditions = hcomc::preset_names();
  } else {
    conditions = split(o.condition, ',');
  }
  const auto controllers = split(o.controller.empty() ? "hcomc,fifo" : o.controller, ',');
  const auto optimizers = split(o.optimizer.empty() ? "nsga2" : o.optimizer, ',');
  const auto seeds = parse_seeds(o.seed.empty() ? "1" : o.seed);

  hcomc::ExperimentGrid grid;
  for (const auto& cond : conditions) {
    const auto preset = hcomc::load_preset(cond);
    for (const auto& ctrl : controllers) {
      for (const auto& opt : optimizers) {
        // FIFO does not optimise; one cell per seed is enough.
        if (ctrl == "fifo" && opt != optimizers.front()) continue;
        for (auto seed : seeds) {
          hcomc::ExperimentCell cell{preset};
          cell.cfg.controller = hcomc::parse_controller(ctrl);
          cell.cfg.optimizer = hcomc::parse_optimizer(opt);
          cell.cfg.seed = seed;
          cell.cfg.ga.seed = seed;
          grid.cells.push_back(cell);
        }
      }
    }
  }
  const auto outcomes = hcomc::run_experiment(grid, o.out);
  hcomc::write_metrics_header(std::cout);
  bool collided = false;
  for (const auto& c : outcomes) {
    hcomc::write_metrics_row(std::cout, c);
    collided = collided || c.collision;
  }
  return collided ? kCollision : kOk;
}

int run_compare(const Options& o) {
  if (!o.config.empty() && !o.condition.empty()) {
    throw hcomc::ConfigError("compare-optimizers: --config and --condition are exclusive");
  }
  const std::string condition =
      o.condition.empty() && o.config.empty() ? "condition1" : o.condition;
  Options no_seed = o;
  no_seed.seed.clear();
  const auto cfg = base_config(no_seed, condition);
  const auto seeds = parse_seeds(o.seed.empty() ? "1:10" : o.seed);
  hcomc::ensure_writable_dir(o.out);
  const auto rows = hcomc::compare_optimizers(cfg, seeds);
  std::ofstream f(std::filesystem::path(o.out) / "optimizers.csv");
  hcomc::write_comparison_csv(f, cfg.condition, rows);
  hcomc::write_comparison_csv(std::cout, cfg.condition, rows);
  return kOk;
}

int run_validate(const Options& o) {
  if (o.config.empty() && o.condition.empty()) {
    throw hcomc::ConfigError("validate-config: give --config or --condition");
  }
  const auto cfg = o.config.empty() ? hcomc::load_preset(o.condition) : hcomc::load_config(o.config);
  // Spawning checks that the headways leave room for every vehicle.
  (void)hcomc::build_scenario(cfg, cfg.seed);
  std::cout << "ok: " << (o.config.empty() ? o.condition : o.config) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative on-ramp merging simulator"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON scenario config")->envname("HCOMC_CONFIG");
    sub->add_option("--out", o.out, "Output directory")->envname("HCOMC_OUT");
    sub->add_option("--seed", o.seed, "Seed, list (1,2) or range (1:10)")->envname("HCOMC_SEED");
    sub->add_option("--controller", o.controller, "hcomc or fifo")->envname("HCOMC_CONTROLLER");
    sub->add_option("--optimizer", o.optimizer, "nsga2, pso or sa")->envname("HCOMC_OPTIMIZER");
    sub->add_option("--condition", o.condition, "Preset name, e.g. condition1")
        ->envname("HCOMC_CONDITION");
  };
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  auto* grid = app.add_subcommand("grid", "Run a condition x controller x optimizer x seed grid");
  auto* compare = app.add_subcommand("compare-optimizers", "Compare NSGA-II, PSO and SA");
  auto* validate = app.add_subcommand("validate-config", "Check a config without running");
  for (auto* sub : {run, grid, compare, validate}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_single(o);
    if (*grid) return run_grid(o);
    if (*compare) return run_compare(o);
    if (*validate) return run_validate(o);
  } catch (const hcomc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
