#include <benchmark/benchmark.h>

#include "dynsbm/simgen.hpp"
#include "dynsbm/ssbm.hpp"

namespace {

using namespace dynsbm;

void BM_SpectralInit(benchmark::State& state) {
  SimParams p;
  p.n_nodes = static_cast<int>(state.range(0));
  p.T = 1;
  p.churn_fraction = 0.0;
  p.seed = 41;
  const Simulation sim = generate(p);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ClassAssignment a = spectral_init(sim.snapshots[0], p.k, seed++);
    benchmark::DoNotOptimize(a.label(0));
  }
}
BENCHMARK(BM_SpectralInit)->Arg(128)->Arg(256)->Arg(512);

}  // namespace
