#include "hcomc/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace hcomc {

namespace {

std::string fmt(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

double nan_mean(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

}  // namespace

void ExperimentGrid::validate() const {
  if (cells.empty()) throw ConfigError("grid: no cells");
  if (cells.size() > max_cells) {
    throw ConfigError("grid: " + std::to_string(cells.size()) + " cells exceed the cap of " +
                      std::to_string(max_cells));
  }
  for (const auto& c : cells) c.cfg.validate();
}

std::string trajectory_file_name(const ScenarioConfig& cfg) {
  return "traj_" + cfg.condition + "_" + std::string(to_string(cfg.controller)) + "_" +
         std::string(to_string(cfg.optimizer)) + "_s" + std::to_string(cfg.seed) + ".csv";
}

void write_trajectory_csv(std::ostream& out, const RunResult& r) {
  out << "t,id,role,kind,lane,x,y,v,a\n";
  for (const auto& row : r.rows) {
    out << fmt(row.t, 2) << ',' << row.id << ',' << to_string(row.role) << ','
        << to_string(row.kind) << ',' << to_string(row.lane) << ',' << fmt(row.x, 4) << ','
        << fmt(row.y, 4) << ',' << fmt(row.v, 4) << ',' << fmt(row.a, 4) << '\n';
  }
}

void write_metrics_header(std::ostream& out) {
  out << "condition,controller,optimizer,seed,Crit.Dist.,Aver.Acc.,Stab.Time,LSRV,Fuel\n";
}

void write_metrics_row(std::ostream& out, const CellOutcome& c) {
  out << c.condition << ',' << to_string(c.controller) << ',' << to_string(c.optimizer) << ','
      << c.seed << ',' << fmt(c.metrics.crit_dist, 4) << ',' << fmt(c.metrics.aver_acc, 6) << ','
      << fmt(c.metrics.stab_time, 2) << ',' << fmt(c.metrics.lsrv, 4) << ','
      << fmt(c.metrics.fuel, 6) << '\n';
}

void ensure_writable_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto probe = out_dir / ".write_probe";
  std::ofstream f(probe);
  if (!f) throw ConfigError("out: directory '" + out_dir.string() + "' is not writable");
  f.close();
  std::filesystem::remove(probe, ec);
}

CellOutcome run_cell(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  const RunResult r = run_scenario(cfg);
  CellOutcome c;
  c.condition = cfg.condition;
  c.controller = cfg.controller;
  c.optimizer = cfg.optimizer;
  c.seed = cfg.seed;
  c.metrics = compute_metrics(r, cfg);
  c.collision = r.collision.has_value();
  c.forced_stop = r.forced_stop_time.has_value();
  c.plan_cost = r.plan_cost;
  c.trajectory_file = out_dir / trajectory_file_name(cfg);
  std::ofstream f(c.trajectory_file);
  if (!f) throw std::runtime_error("cannot write " + c.trajectory_file.string());
  write_trajectory_csv(f, r);
  return c;
}

std::vector<CellOutcome> run_experiment(const ExperimentGrid& grid,
                                        const std::filesystem::path& out_dir) {
  grid.validate();
  ensure_writable_dir(out_dir);
  std::vector<CellOutcome> out(grid.cells.size());
  std::vector<std::string> errors(grid.cells.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = run_cell(grid.cells[i].cfg, out_dir);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  std::ofstream f(out_dir / "metrics.csv");
  if (!f) throw std::runtime_error("cannot write metrics.csv");
  write_metrics_header(f);
  for (const auto& c : out) write_metrics_row(f, c);
  return out;
}

std::vector<OptimizerSummary> compare_optimizers(const ScenarioConfig& base,
                                                 const std::vector<std::uint64_t>& seeds) {
  std::vector<OptimizerSummary> rows;
  for (OptimizerKind opt : {OptimizerKind::Nsga2, OptimizerKind::Pso, OptimizerKind::Sa}) {
    OptimizerSummary s;
    s.optimizer = opt;
    std::vector<MetricsRow> metrics(seeds.size());
    s.costs.assign(seeds.size(), std::nan(""));
    const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ScenarioConfig cfg = base;
      cfg.controller = ControllerKind::Hcomc;
      cfg.optimizer = opt;
      cfg.seed = seeds[i];
      const RunResult r = run_scenario(cfg);
      metrics[i] = compute_metrics(r, cfg);
      if (r.plan_cost) s.costs[i] = *r.plan_cost;
    }
    s.runs = seeds.size();
    s.mean_cost = nan_mean(s.costs);
    auto column = [&](double MetricsRow::*field) {
      std::vector<double> xs;
      for (const auto& m : metrics) xs.push_back(m.*field);
      return nan_mean(xs);
    };
    s.mean_metrics.crit_dist = column(&MetricsRow::crit_dist);
    s.mean_metrics.aver_acc = column(&MetricsRow::aver_acc);
    s.mean_metrics.stab_time = column(&MetricsRow::stab_time);
    s.mean_metrics.lsrv = column(&MetricsRow::lsrv);
    s.mean_metrics.fuel = column(&MetricsRow::fuel);
    rows.push_back(std::move(s));
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::string& condition,
                          const std::vector<OptimizerSummary>& rows) {
  out << "condition,optimizer,runs,plan_cost,Crit.Dist.,Aver.Acc.,Stab.Time,LSRV,Fuel\n";
  for (const auto& s : rows) {
    out << condition << ',' << to_string(s.optimizer) << ',' << s.runs << ','
        << fmt(s.mean_cost, 6) << ',' << fmt(s.mean_metrics.crit_dist, 4) << ','
        << fmt(s.mean_metrics.aver_acc, 6) << ',' << fmt(s.mean_metrics.stab_time, 2) << ','
        << fmt(s.mean_metrics.lsrv, 4) << ',' << fmt(s.mean_metrics.fuel, 6) << '\n';
  }
}

}  // namespace hcomc
