// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "hcomc/config.hpp"
#include "hcomc/merge_scene.hpp"
#include "hcomc/optimizer.hpp"

using namespace hcomc;

namespace {

std::vector<Objectives> random_points(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Objectives> pts(n);
  for (auto& p : pts)
    for (auto& c : p) c = u(rng);
  return pts;
}

std::vector<DecisionVector> population(std::size_t n) {
  std::vector<DecisionVector> out;
  auto rng = stream_for(7, 0, 0);
  const DecisionSpace space;
  std::uniform_real_distribution<double> t(space.t_min, space.t_max);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({i % 2 ? GapChoice::BehindVmc : GapChoice::AheadOfVmc, space.snap(t(rng)),
                   space.modes[i % space.modes.size()]});
  }
  return out;
}

Evaluator scene_evaluator() {
  static const auto snapshot =
      std::make_shared<const World>(build_scenario(load_preset("condition1"), 1));
  return make_evaluator(snapshot);
}

void BM_Sort(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(non_dominated_sort(pts));
  state.SetComplexityN(state.range(0));
}

void BM_SortSerial(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(non_dominated_sort_serial(pts));
  state.SetComplexityN(state.range(0));
}

// A fresh cache per iteration so every decision is simulated.
void BM_Evaluate(benchmark::State& state) {
  const auto pop = population(static_cast<std::size_t>(state.range(0)));
  const auto eval = scene_evaluator();
  for (auto _ : state) {
    EvaluationCache cache(eval);
    benchmark::DoNotOptimize(cache.evaluate_population(pop));
  }
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto pop = population(static_cast<std::size_t>(state.range(0)));
  const auto eval = scene_evaluator();
  for (auto _ : state) {
    EvaluationCache cache(eval);
    benchmark::DoNotOptimize(cache.evaluate_population_serial(pop));
  }
}

}  // namespace

BENCHMARK(BM_Sort)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_SortSerial)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK(BM_Evaluate)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
