#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcomc/config.hpp"
#include "hcomc/controllers.hpp"
#include "hcomc/metrics.hpp"

namespace hcomc {

struct ExperimentCell {
  ScenarioConfig cfg;  // condition, controller, optimizer and seed filled in
};

struct ExperimentGrid {
  std::vector<ExperimentCell> cells;
  std::size_t max_cells = 2000;

  void validate() const;
};

struct CellOutcome {
  std::string condition;
  ControllerKind controller = ControllerKind::Hcomc;
  OptimizerKind optimizer = OptimizerKind::Nsga2;
  std::uint64_t seed = 0;
  MetricsRow metrics;
  bool collision = false;
  bool forced_stop = false;
  std::optional<double> plan_cost;
  std::filesystem::path trajectory_file;
};

std::string trajectory_file_name(const ScenarioConfig& cfg);

void write_trajectory_csv(std::ostream& out, const RunResult& result);
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const CellOutcome& cell);

// Fails before simulating anything when out_dir cannot be written.
void ensure_writable_dir(const std::filesystem::path& out_dir);

CellOutcome run_cell(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

// Runs every cell (concurrently), writes one trajectory CSV per cell and
// metrics.csv, and returns the outcomes in grid order.
std::vector<CellOutcome> run_experiment(const ExperimentGrid& grid,
                                        const std::filesystem::path& out_dir);

struct OptimizerSummary {
  OptimizerKind optimizer = OptimizerKind::Nsga2;
  std::size_t runs = 0;
  double mean_cost = 0.0;
  MetricsRow mean_metrics;
  std::vector<double> costs;  // per seed, in seed order
};

// Plans the same frozen scene with every optimiser for each seed.
std::vector<OptimizerSummary> compare_optimizers(const ScenarioConfig& base,
                                                 const std::vector<std::uint64_t>& seeds);
void write_comparison_csv(std::ostream& out, const std::string& condition,
                          const std::vector<OptimizerSummary>& rows);

}  // namespace hcomc
