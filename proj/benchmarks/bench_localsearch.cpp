#include <benchmark/benchmark.h>

#include "dynsbm/aposteriori.hpp"
#include "dynsbm/pipeline.hpp"
#include "dynsbm/simgen.hpp"

namespace {

using namespace dynsbm;

void BM_FitStep(benchmark::State& state) {
  SimParams p;
  p.n_nodes = static_cast<int>(state.range(0));
  p.directed = true;
  p.seed = 3;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  SearchConfig search;
  search.max_iter = 400;
  const FitStepResult init = fit_initial(sim.snapshots[0], p.k, search, 17);
  for (auto _ : state) {
    const FitStepResult step =
        fit_step(sim.snapshots[1], init.assignment, init.state, cfg, search);
    benchmark::DoNotOptimize(step.score.value());
  }
}
BENCHMARK(BM_FitStep)->Arg(128)->Arg(256);

void BM_AposterioriRun(benchmark::State& state) {
  SimParams p;
  p.directed = true;
  p.seed = 29;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  SearchConfig search;
  search.max_iter = 400;
  for (auto _ : state) {
    const AposterioriResult r = run_aposteriori(sim.snapshots, p.k, cfg, search, 23);
    benchmark::DoNotOptimize(r.scores.back().value());
  }
}
BENCHMARK(BM_AposterioriRun);

}  // namespace
