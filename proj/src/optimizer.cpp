#include "hcomc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "hcomc/objectives.hpp"

namespace hcomc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

DecisionVector random_decision(const DecisionSpace& space, std::mt19937_64& rng) {
  DecisionVector d;
  d.gap = uniform(rng) < 0.5 ? GapChoice::AheadOfVmc : GapChoice::BehindVmc;
  d.merge_end_time = space.snap(space.t_min + uniform(rng) * (space.t_max - space.t_min));
  const auto k = std::min(space.modes.size() - 1,
                          static_cast<std::size_t>(uniform(rng) * space.modes.size()));
  d.vmc_mode = space.modes[k];
  return d;
}

Objectives best_feasible(std::span<const MergePlan> plans) {
  Objectives best{kInf, kInf, kInf};
  for (const auto& p : plans) {
    if (!p.feasible) continue;
    const auto m = p.objectives.minimized();
    for (std::size_t k = 0; k < 3; ++k) best[k] = std::min(best[k], m[k]);
  }
  return best;
}

std::vector<std::vector<std::size_t>> peel_fronts(std::vector<std::vector<std::size_t>>& dominated,
                                                  std::vector<int>& count) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < count.size(); ++i) {
    if (count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<Objectives> objectives_of(std::span<const MergePlan> plans) {
  std::vector<Objectives> pts;
  pts.reserve(plans.size());
  for (const auto& p : plans) pts.push_back(p.objectives.minimized());
  return pts;
}

// Better by rank, then by crowding; ties keep the first.
bool crowded_less(const MergePlan& a, const MergePlan& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

void assign_rank_and_crowding(std::vector<MergePlan>& plans) {
  const auto pts = objectives_of(plans);
  const auto fronts = non_dominated_sort(std::span<const Objectives>(pts));
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto cd = crowding_distance(pts, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      plans[fronts[r][k]].rank = static_cast<int>(r);
      plans[fronts[r][k]].crowding = cd[k];
    }
  }
}

}  // namespace

void DecisionSpace::validate() const {
  if (!(t_min > 0.0 && t_max >= t_min)) {
    throw std::invalid_argument("DecisionSpace: need 0 < t_min <= t_max");
  }
  if (t_step < 0.0) throw std::invalid_argument("DecisionSpace: t_step must be >= 0");
  if (modes.empty()) throw std::invalid_argument("DecisionSpace: no cooperation modes");
}

double DecisionSpace::snap(double t) const {
  t = std::clamp(t, t_min, t_max);
  if (t_step <= 0.0) return t;
  const double k = std::round((t - t_min) / t_step);
  return std::min(t_max, t_min + k * t_step);
}

std::vector<DecisionVector> DecisionSpace::enumerate() const {
  if (t_step <= 0.0) throw std::invalid_argument("DecisionSpace::enumerate: t_step is 0");
  const auto n = static_cast<int>(std::floor((t_max - t_min) / t_step + 1e-9)) + 1;
  std::vector<DecisionVector> out;
  for (GapChoice gap : {GapChoice::AheadOfVmc, GapChoice::BehindVmc}) {
    for (int k = 0; k < n; ++k) {
      for (VmcMode mode : modes) out.push_back({gap, t_min + k * t_step, mode});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void GaConfig::validate() const {
  if (population < 4 || population % 2 != 0) {
    throw std::invalid_argument("GaConfig: population must be even and >= 4");
  }
  if (generations < 0) throw std::invalid_argument("GaConfig: generations must be >= 0");
  if (crossover_prob < 0 || crossover_prob > 1 || mutation_prob < 0 || mutation_prob > 1) {
    throw std::invalid_argument("GaConfig: probabilities must lie in [0,1]");
  }
  if (eta_crossover < 0 || eta_mutation < 0) {
    throw std::invalid_argument("GaConfig: distribution indexes must be >= 0");
  }
}

void PsoConfig::validate() const {
  if (particles < 1) throw std::invalid_argument("PsoConfig: particles must be >= 1");
  if (inertia < 0 || cognitive < 0 || social < 0) {
    throw std::invalid_argument("PsoConfig: coefficients must be >= 0");
  }
}

void SaConfig::validate() const {
  if (initial_temperature < 0) throw std::invalid_argument("SaConfig: temperature must be >= 0");
  if (!(cooling > 0 && cooling <= 1)) throw std::invalid_argument("SaConfig: cooling in (0,1]");
  if (step_fraction <= 0) throw std::invalid_argument("SaConfig: step_fraction must be > 0");
  if (discrete_move_prob < 0 || discrete_move_prob > 1) {
    throw std::invalid_argument("SaConfig: discrete_move_prob in [0,1]");
  }
  if (initial_samples < 1) throw std::invalid_argument("SaConfig: initial_samples >= 1");
}

double scalarized_cost(const MergePlan& plan, const ScalarizationBounds& b) {
  if (!plan.feasible) return kPenaltyObjective;
  const auto& o = plan.objectives;
  if (o.u_safe > kSafetyThreshold) return 2.0 + o.u_safe;
  auto norm = [](double v, double lo, double hi) {
    return hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  };
  return norm(o.u_fuel, b.fuel_lo, b.fuel_hi) + norm(-o.u_eff, b.neg_eff_lo, b.neg_eff_hi);
}

bool dominates(const Objectives& a, const Objectives& b) {
  bool strictly = false;
  for (std::size_t k = 0; k < 3; ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strictly = true;
  }
  return strictly;
}

namespace {

// 1 when a dominates b, -1 when b dominates a, else 0; one pass.
int dominance(const Objectives& a, const Objectives& b) {
  bool a_better = false, b_better = false;
  for (std::size_t k = 0; k < 3; ++k) {
    a_better = a_better || a[k] < b[k];
    b_better = b_better || b[k] < a[k];
  }
  return a_better == b_better ? 0 : (a_better ? 1 : -1);
}

}  // namespace

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Objectives> points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<std::vector<std::size_t>> dominated(points.size());
  std::vector<int> count(points.size(), 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int d = dominance(points[i], points[j]);
      if (d > 0) dominated[i].push_back(static_cast<std::size_t>(j));
      else if (d < 0) ++count[i];
    }
  }
  return peel_fronts(dominated, count);
}

std::vector<std::vector<std::size_t>> non_dominated_sort_serial(
    std::span<const Objectives> points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int d = dominance(points[i], points[j]);
      if (d > 0) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (d < 0) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  return peel_fronts(dominated, count);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const MergePlan> plans) {
  const auto pts = objectives_of(plans);
  return non_dominated_sort(std::span<const Objectives>(pts));
}

std::vector<double> crowding_distance(std::span<const Objectives> points,
                                      std::span<const std::size_t> front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < 3; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[front[a]][k] < points[front[b]][k];
    });
    const double lo = points[front[order.front()]][k];
    const double hi = points[front[order.back()]][k];
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    if (!(hi > lo)) continue;
    for (std::size_t r = 1; r + 1 < m; ++r) {
      dist[order[r]] +=
          (points[front[order[r + 1]]][k] - points[front[order[r - 1]]][k]) / (hi - lo);
    }
  }
  return dist;
}

std::vector<double> crowding_distance(std::span<const MergePlan> front) {
  const auto pts = objectives_of(front);
  std::vector<std::size_t> idx(front.size());
  std::iota(idx.begin(), idx.end(), 0);
  return crowding_distance(pts, idx);
}

std::vector<MergePlan> EvaluationCache::lookup(std::span<const DecisionVector> decisions) {
  std::vector<MergePlan> out;
  out.reserve(decisions.size());
  for (const auto& d : decisions) out.push_back(cache_.at(d));
  requests_ += decisions.size();
  return out;
}

std::vector<MergePlan> EvaluationCache::evaluate_population(
    std::span<const DecisionVector> decisions) {
  std::vector<DecisionVector> todo;
  for (const auto& d : decisions) {
    if (!cache_.contains(d)) todo.push_back(d);
  }
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

  std::vector<MergePlan> results(todo.size());
  const auto n = static_cast<std::ptrdiff_t>(todo.size());
  std::vector<std::exception_ptr> errors(todo.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = evaluator_(todo[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], results[i]);
  evaluations_ += todo.size();
  return lookup(decisions);
}

std::vector<MergePlan> EvaluationCache::evaluate_population_serial(
    std::span<const DecisionVector> decisions) {
  for (const auto& d : decisions) {
    if (!cache_.contains(d)) {
      cache_.emplace(d, evaluator_(d));
      ++evaluations_;
    }
  }
  return lookup(decisions);
}

MergePlan EvaluationCache::evaluate(const DecisionVector& decision) {
  return evaluate_population_serial(std::span<const DecisionVector>(&decision, 1)).front();
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t generation,
                           std::uint64_t individual) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(generation),
                    static_cast<std::uint32_t>(individual)};
  return std::mt19937_64(seq);
}

namespace {

// Simulated binary crossover on one bounded real gene.
std::pair<double, double> sbx(double a, double b, double eta, std::mt19937_64& rng) {
  const double u = uniform(rng);
  const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                               : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
  return {0.5 * ((1 + beta) * a + (1 - beta) * b), 0.5 * ((1 - beta) * a + (1 + beta) * b)};
}

double polynomial_mutation(double x, double lo, double hi, double eta, std::mt19937_64& rng) {
  const double u = uniform(rng);
  const double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                               : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
  return x + delta * (hi - lo);
}

std::size_t tournament(const std::vector<MergePlan>& pop, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  const std::size_t a = pick(rng);
  const std::size_t b = pick(rng);
  if (crowded_less(pop[b], pop[a])) return b;
  if (crowded_less(pop[a], pop[b])) return a;
  return std::min(a, b);
}

std::vector<DecisionVector> make_offspring(const std::vector<MergePlan>& pop,
                                           const DecisionSpace& space, const GaConfig& cfg,
                                           int generation) {
  std::vector<DecisionVector> children;
  children.reserve(pop.size());
  for (std::size_t k = 0; 2 * k < pop.size(); ++k) {
    auto rng = stream_for(cfg.seed, static_cast<std::uint64_t>(generation), k);
    DecisionVector c1 = pop[tournament(pop, rng)].decision;
    DecisionVector c2 = pop[tournament(pop, rng)].decision;
    if (uniform(rng) < cfg.crossover_prob) {
      auto [t1, t2] = sbx(c1.merge_end_time, c2.merge_end_time, cfg.eta_crossover, rng);
      c1.merge_end_time = t1;
      c2.merge_end_time = t2;
      if (uniform(rng) < 0.5) std::swap(c1.gap, c2.gap);
      if (uniform(rng) < 0.5) std::swap(c1.vmc_mode, c2.vmc_mode);
    }
    for (DecisionVector* c : {&c1, &c2}) {
      if (uniform(rng) < cfg.mutation_prob) {
        c->merge_end_time = polynomial_mutation(c->merge_end_time, space.t_min, space.t_max,
                                                cfg.eta_mutation, rng);
      }
      if (uniform(rng) < cfg.mutation_prob) {
        c->gap = uniform(rng) < 0.5 ? GapChoice::AheadOfVmc : GapChoice::BehindVmc;
      }
      if (uniform(rng) < cfg.mutation_prob) {
        c->vmc_mode = space.modes[std::min(
            space.modes.size() - 1, static_cast<std::size_t>(uniform(rng) * space.modes.size()))];
      }
      c->merge_end_time = space.snap(c->merge_end_time);
      children.push_back(*c);
    }
  }
  return children;
}

}  // namespace

Nsga2Result nsga2_run(const Evaluator& evaluator, const DecisionSpace& space,
                      const GaConfig& cfg) {
  cfg.validate();
  space.validate();
  EvaluationCache cache(evaluator);
  const auto n = static_cast<std::size_t>(cfg.population);

  std::vector<DecisionVector> init;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_for(cfg.seed, 0, i);
    init.push_back(random_decision(space, rng));
  }
  std::vector<MergePlan> pop = cache.evaluate_population(init);
  assign_rank_and_crowding(pop);

  Nsga2Result result;
  result.best_per_generation.push_back(best_feasible(pop));

  for (int g = 1; g <= cfg.generations; ++g) {
    const auto children = make_offspring(pop, space, cfg, g);
    auto offspring = cache.evaluate_population(children);
    std::vector<MergePlan> merged = pop;
    merged.insert(merged.end(), offspring.begin(), offspring.end());
    assign_rank_and_crowding(merged);

    std::vector<std::size_t> order(merged.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return crowded_less(merged[a], merged[b]);
    });
    std::vector<MergePlan> next;
    next.reserve(n);
    for (std::size_t k = 0; k < n; ++k) next.push_back(merged[order[k]]);
    pop = std::move(next);
    // Crowding is recomputed over the survivors so selection sees the new
    // population's spacing.
    assign_rank_and_crowding(pop);
    result.best_per_generation.push_back(best_feasible(pop));
  }

  std::vector<MergePlan> front;
  for (const auto& p : pop) {
    if (p.rank == 0) front.push_back(p);
  }
  std::sort(front.begin(), front.end(),
            [](const MergePlan& a, const MergePlan& b) { return a.decision < b.decision; });
  front.erase(std::unique(front.begin(), front.end(),
                          [](const MergePlan& a, const MergePlan& b) {
                            return a.decision == b.decision;
                          }),
              front.end());
  const auto cd = crowding_distance(front);
  for (std::size_t k = 0; k < front.size(); ++k) front[k].crowding = cd[k];

  result.pareto = std::move(front);
  result.population = std::move(pop);
  result.requests = cache.requests();
  return result;
}

namespace {

std::size_t budget_of(const GaConfig& cfg) {
  return static_cast<std::size_t>(cfg.population) *
         static_cast<std::size_t>(cfg.generations + 1);
}

struct Particle {
  std::array<double, 3> pos{};
  std::array<double, 3> vel{};
  std::array<double, 3> best_pos{};
  double best_cost = kInf;
};

DecisionVector decode(const std::array<double, 3>& p, const DecisionSpace& space) {
  DecisionVector d;
  d.gap = p[0] < 1.0 ? GapChoice::AheadOfVmc : GapChoice::BehindVmc;
  d.merge_end_time = space.snap(p[1]);
  const auto k = std::min(space.modes.size() - 1, static_cast<std::size_t>(std::max(0.0, p[2])));
  d.vmc_mode = space.modes[k];
  return d;
}

}  // namespace

ScalarRunResult pso_run(const Evaluator& evaluator, const DecisionSpace& space,
                        const PsoConfig& cfg, const GaConfig& budget_from,
                        const ScalarizationBounds& bounds) {
  cfg.validate();
  space.validate();
  EvaluationCache cache(evaluator);
  const std::array<double, 3> lo{0.0, space.t_min, 0.0};
  const std::array<double, 3> hi{2.0 - 1e-9, space.t_max,
                                 static_cast<double>(space.modes.size()) - 1e-9};
  const auto np = static_cast<std::size_t>(cfg.particles);
  const std::size_t budget = budget_of(budget_from);
  const std::uint64_t seed = budget_from.seed;

  std::vector<Particle> swarm(np);
  std::vector<DecisionVector> batch(np);
  for (std::size_t i = 0; i < np; ++i) {
    auto rng = stream_for(seed, 0, i);
    for (std::size_t k = 0; k < 3; ++k) {
      swarm[i].pos[k] = lo[k] + uniform(rng) * (hi[k] - lo[k]);
      swarm[i].vel[k] = (uniform(rng) - 0.5) * 0.2 * (hi[k] - lo[k]);
    }
    batch[i] = decode(swarm[i].pos, space);
  }

  ScalarRunResult out;
  out.best_cost = kInf;
  std::array<double, 3> gbest{};
  auto absorb = [&](const std::vector<MergePlan>& plans) {
    for (std::size_t i = 0; i < np; ++i) {
      const double c = scalarized_cost(plans[i], bounds);
      if (c < swarm[i].best_cost) {
        swarm[i].best_cost = c;
        swarm[i].best_pos = swarm[i].pos;
      }
      if (c < out.best_cost) {
        out.best_cost = c;
        out.best = plans[i];
        gbest = swarm[i].pos;
      }
    }
  };
  absorb(cache.evaluate_population(batch));

  const std::size_t iterations = budget / np > 0 ? budget / np - 1 : 0;
  for (std::size_t it = 1; it <= iterations; ++it) {
    for (std::size_t i = 0; i < np; ++i) {
      auto rng = stream_for(seed, it, i);
      auto& p = swarm[i];
      for (std::size_t k = 0; k < 3; ++k) {
        const double span = hi[k] - lo[k];
        p.vel[k] = cfg.inertia * p.vel[k] +
                   cfg.cognitive * uniform(rng) * (p.best_pos[k] - p.pos[k]) +
                   cfg.social * uniform(rng) * (gbest[k] - p.pos[k]);
        p.vel[k] = std::clamp(p.vel[k], -span, span);
        p.pos[k] = std::clamp(p.pos[k] + p.vel[k], lo[k], hi[k]);
      }
      batch[i] = decode(p.pos, space);
    }
    absorb(cache.evaluate_population(batch));
  }
  out.requests = cache.requests();
  return out;
}

ScalarRunResult sa_run(const Evaluator& evaluator, const DecisionSpace& space,
                       const SaConfig& cfg, const GaConfig& budget_from,
                       const ScalarizationBounds& bounds) {
  cfg.validate();
  space.validate();
  EvaluationCache cache(evaluator);
  const std::size_t budget = budget_of(budget_from);
  const std::uint64_t seed = budget_from.seed;
  const auto n_init = std::min<std::size_t>(static_cast<std::size_t>(cfg.initial_samples), budget);

  std::vector<DecisionVector> init;
  for (std::size_t i = 0; i < n_init; ++i) {
    auto rng = stream_for(seed, 0, i);
    init.push_back(random_decision(space, rng));
  }
  const auto plans = cache.evaluate_population(init);

  ScalarRunResult out;
  out.best_cost = kInf;
  for (const auto& p : plans) {
    const double c = scalarized_cost(p, bounds);
    if (c < out.best_cost) {
      out.best_cost = c;
      out.best = p;
    }
  }
  if (cfg.initial_temperature <= 0.0) {
    out.requests = cache.requests();
    return out;
  }

  MergePlan current = out.best;
  double current_cost = out.best_cost;
  double temperature = cfg.initial_temperature;
  const double sigma = cfg.step_fraction * (space.t_max - space.t_min);
  for (std::size_t it = n_init; it < budget; ++it) {
    auto rng = stream_for(seed, 1, it);
    DecisionVector cand = current.decision;
    if (uniform(rng) < cfg.discrete_move_prob) {
      if (uniform(rng) < 0.5) {
        cand.gap = cand.gap == GapChoice::AheadOfVmc ? GapChoice::BehindVmc : GapChoice::AheadOfVmc;
      } else {
        cand.vmc_mode = space.modes[std::min(
            space.modes.size() - 1, static_cast<std::size_t>(uniform(rng) * space.modes.size()))];
      }
    } else {
      cand.merge_end_time = space.snap(
          cand.merge_end_time + sigma * std::normal_distribution<double>(0.0, 1.0)(rng));
    }
    const MergePlan plan = cache.evaluate(cand);
    const double c = scalarized_cost(plan, bounds);
    const double delta = c - current_cost;
    if (delta <= 0.0 || uniform(rng) < std::exp(-delta / temperature)) {
      current = plan;
      current_cost = c;
    }
    if (c < out.best_cost) {
      out.best_cost = c;
      out.best = plan;
    }
    temperature *= cfg.cooling;
  }
  out.requests = cache.requests();
  return out;
}

}  // namespace hcomc
