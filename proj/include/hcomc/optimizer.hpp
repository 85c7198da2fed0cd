#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "hcomc/merge_plan.hpp"

namespace hcomc {

// Bounds of the decision space. With t_step > 0 merge_end_time is snapped to
// the grid t_min + k * t_step.
struct DecisionSpace {
  double t_min = 6.0;
  double t_max = 20.0;
  double t_step = 0.1;
  std::vector<VmcMode> modes{VmcMode::NoCooperation, VmcMode::LongitudinalCooperation,
                             VmcMode::LateralCooperation};

  void validate() const;
  [[nodiscard]] double snap(double t) const;
  // Every grid decision; requires t_step > 0.
  [[nodiscard]] std::vector<DecisionVector> enumerate() const;
};

// Must be safe to call concurrently on distinct decisions.
using Evaluator = std::function<MergePlan(const DecisionVector&)>;

struct GaConfig {
  int population = 40;
  int generations = 60;
  double crossover_prob = 0.9;
  double mutation_prob = 1.0 / 3.0;
  double eta_crossover = 15.0;
  double eta_mutation = 20.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PsoConfig {
  int particles = 20;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;

  void validate() const;
};

struct SaConfig {
  double initial_temperature = 0.5;
  double cooling = 0.97;
  // Standard deviation of a merge_end_time move, as a fraction of the range.
  double step_fraction = 0.15;
  double discrete_move_prob = 0.3;
  int initial_samples = 8;

  void validate() const;
};

// Fixed reference bounds used by the scalarised baselines.
// Defaults bracket the feasible candidates of the shipped condition1 scenes.
struct ScalarizationBounds {
  double fuel_lo = 0.03;
  double fuel_hi = 0.06;
  double neg_eff_lo = 0.4;
  double neg_eff_hi = 1.8;
};

// Safety-gated scalar cost: infeasible plans cost kPenaltyObjective, plans
// above the safety threshold cost 2 + u_safe, the rest the sum of fuel and
// -u_eff each normalised to [0, 1] by the reference bounds.
double scalarized_cost(const MergePlan& plan, const ScalarizationBounds& bounds);

using Objectives = std::array<double, 3>;

// a dominates b: no worse in every component and better in at least one.
bool dominates(const Objectives& a, const Objectives& b);

// Fronts of point indices, front 0 first; indices ascend within a front.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> points);
std::vector<std::vector<std::size_t>> non_dominated_sort_serial(
    std::span<const Objectives> points);
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const MergePlan> plans);

// Crowding distance of each member of `front` (indices into points).
std::vector<double> crowding_distance(std::span<const Objectives> points,
                                      std::span<const std::size_t> front);
std::vector<double> crowding_distance(std::span<const MergePlan> front);

// Memoised evaluation. Unique uncached decisions of a batch are evaluated in
// parallel; results are stored by decision.
class EvaluationCache {
 public:
  explicit EvaluationCache(Evaluator evaluator) : evaluator_(std::move(evaluator)) {}

  std::vector<MergePlan> evaluate_population(std::span<const DecisionVector> decisions);
  std::vector<MergePlan> evaluate_population_serial(std::span<const DecisionVector> decisions);
  MergePlan evaluate(const DecisionVector& decision);

  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }
  [[nodiscard]] std::size_t requests() const { return requests_; }

 private:
  std::vector<MergePlan> lookup(std::span<const DecisionVector> decisions);

  Evaluator evaluator_;
  std::map<DecisionVector, MergePlan> cache_;
  std::size_t evaluations_ = 0;
  std::size_t requests_ = 0;
};

struct Nsga2Result {
  std::vector<MergePlan> pareto;  // final front 0, unique decisions
  std::vector<MergePlan> population;
  // Best feasible value of each minimised objective per generation (index 0
  // is the initial population); +inf while no feasible plan exists.
  std::vector<Objectives> best_per_generation;
  std::size_t requests = 0;
};

Nsga2Result nsga2_run(const Evaluator& evaluator, const DecisionSpace& space,
                      const GaConfig& cfg);

struct ScalarRunResult {
  MergePlan best;
  double best_cost = 0.0;
  std::size_t requests = 0;
};

// Both baselines spend the same number of evaluation requests as NSGA-II with
// `budget_from` (population * (generations + 1)).
ScalarRunResult pso_run(const Evaluator& evaluator, const DecisionSpace& space,
                        const PsoConfig& cfg, const GaConfig& budget_from,
                        const ScalarizationBounds& bounds);
ScalarRunResult sa_run(const Evaluator& evaluator, const DecisionSpace& space,
                       const SaConfig& cfg, const GaConfig& budget_from,
                       const ScalarizationBounds& bounds);

// Independent random stream for (seed, generation, individual).
std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t generation,
                           std::uint64_t individual);

}  // namespace hcomc
