#include <benchmark/benchmark.h>

#include "sphsparse/harness.hpp"
#include "sphsparse/solver.hpp"

using namespace sphsparse;

namespace {

// A fixed number of DR iterations on a noise-map inpainting problem.
void BM_SolveInpaint(benchmark::State& state) {
  ExperimentSpec spec;
  spec.L = static_cast<int>(state.range(0));
  spec.setting = state.range(1) ? Setting::analysis : Setting::synthesis;
  spec.n_m = 1.0;
  spec.solver.max_iter = 20;
  spec.solver.final_projection_max = 100;
  const HarmonicCoeffs truth = make_noise_testmap(spec.L, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec, truth));
  state.SetLabel(to_string(spec.setting) + ", 20 iterations");
}

void BM_ProxWeightedL1(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Vector z = Vector::Random(n);
  const RealVector w = RealVector::Random(n).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(prox_weighted_l1(z, w, 0.3));
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(BM_SolveInpaint)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProxWeightedL1)->Range(1 << 12, 1 << 20);
