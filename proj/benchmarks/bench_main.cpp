#include <benchmark/benchmark.h>

#include <array>
#include <complex>
#include <vector>

#include "mfvl/fft.hpp"
#include "mfvl/hartree.hpp"
#include "mfvl/operators.hpp"
#include "mfvl/states.hpp"
#include "mfvl/transforms.hpp"
#include "mfvl/vlasov.hpp"

using namespace mfvl;

namespace {

LowRankState bump_state(int n, double eps) {
  CoherentSpec spec;
  spec.eps = eps;
  return coherent_superposition(spec, GridSpec(1, n, 8.0)).state;
}

void BM_Fft3d(benchmark::State& st) {
  const GridSpec grid(3, static_cast<int>(st.range(0)), 8.0);
  std::vector<cplx> data(grid.size(), cplx(1.0, 0.5));
  for (auto _ : st) {
    fft_forward(data, grid);
    fft_backward(data, grid);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_Fft3d)->Arg(32)->Arg(64);

void BM_HartreeStep(benchmark::State& st) {
  HartreeRun run(bump_state(static_cast<int>(st.range(0)), 1.0 / 16), KernelSpec::gaussian(1.0, 1.0, 0.5), 1e-2);
  for (auto _ : st) run.step();
}
BENCHMARK(BM_HartreeStep)->Arg(256)->Arg(1024);

void BM_VlasovStep(benchmark::State& st) {
  const double eps = 1.0 / 16;
  const TransformPlan plan = TransformPlan::make(GridSpec(1, static_cast<int>(st.range(0)), 8.0), eps);
  VlasovRun run(wigner(bump_state(static_cast<int>(st.range(0)), eps), plan), KernelSpec::gaussian(1.0, 1.0, 0.5), 1e-2);
  for (auto _ : st) run.step();
}
BENCHMARK(BM_VlasovStep)->Arg(256)->Arg(512);

void BM_WignerWeyl(benchmark::State& st) {
  const double eps = 1.0 / 16;
  const GridSpec grid(1, static_cast<int>(st.range(0)), 8.0);
  const TransformPlan plan = TransformPlan::make(grid, eps);
  const LowRankState w = bump_state(grid.points(), eps);
  for (auto _ : st) {
    const DenseOperator back = weyl(wigner(w, plan), plan);
    benchmark::DoNotOptimize(back.kernel.data());
  }
}
BENCHMARK(BM_WignerWeyl)->Arg(256)->Arg(512);

void BM_TraceNorm(benchmark::State& st) {
  const LowRankState w = bump_state(static_cast<int>(st.range(0)), 1.0 / 16);
  const DenseOperator a = materialize(w);
  for (auto _ : st) benchmark::DoNotOptimize(trace_norm(a).value);
}
BENCHMARK(BM_TraceNorm)->Arg(256)->Arg(512);

void BM_CommutatorTraceNorm(benchmark::State& st) {
  const LowRankState w = bump_state(static_cast<int>(st.range(0)), 1.0 / 16);
  for (auto _ : st) benchmark::DoNotOptimize(commutator_trace_norm(w, 0));
}
BENCHMARK(BM_CommutatorTraceNorm)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
