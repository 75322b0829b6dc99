#include <benchmark/benchmark.h>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/pipeline.hpp"
#include "dynsbm/simgen.hpp"

namespace {

using namespace dynsbm;

void BM_PredictUpdate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  SimParams p;
  p.k = k;
  p.n_nodes = 32 * k;
  p.T = 2;
  p.churn_fraction = 0.0;
  p.seed = 5;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(k, p.s_diag, p.s_nb);
  const BlockStats s1 = block_counts(sim.snapshots[0], sim.truth.classes[0]);
  const BlockStats s2 = block_counts(sim.snapshots[1], sim.truth.classes[1]);
  const FilterState init = diffuse_init(s1);
  const Vec y = s2.clamped_density_vec();
  for (auto _ : state) {
    FilterState pred = predict(init, cfg);
    FilterState upd = update(pred, y, plugin_obs_cov(pred.mean, s2.n));
    benchmark::DoNotOptimize(upd.mean.sum());
  }
}
BENCHMARK(BM_PredictUpdate)->Arg(2)->Arg(4)->Arg(8);

void BM_AprioriPass(benchmark::State& state) {
  SimParams p;
  p.seed = 11;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  for (auto _ : state) {
    const AprioriResult r = run_apriori(sim.snapshots, sim.truth.classes, cfg);
    benchmark::DoNotOptimize(r.prediction_error);
  }
}
BENCHMARK(BM_AprioriPass);

}  // namespace
