#include <random>

#include <benchmark/benchmark.h>

#include "sphsparse/so3.hpp"
#include "sphsparse/sphere.hpp"
#include "sphsparse/wavelet.hpp"

using namespace sphsparse;

namespace {

Vector noise(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  return v;
}

void BM_SphereInverse(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto t = SphereTransform::cached(L);
  const Vector c = noise(t->n_coeffs(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(t->inverse(c));
  state.SetComplexityN(L);
}

void BM_SphereForward(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto t = SphereTransform::cached(L);
  const Vector x = noise(t->n_samples(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(t->forward(x));
  state.SetComplexityN(L);
}

void BM_WignerForwardAdjoint(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const auto t = WignerTransform::cached(L, N);
  const Vector c = noise(t->n_coeffs(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(t->forward_adjoint(c));
  state.SetComplexityN(L);
}

void BM_WignerInverse(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const auto t = WignerTransform::cached(L, N);
  const Vector c = noise(t->n_coeffs(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(t->inverse(c));
  state.SetComplexityN(L);
}

// Synthesis followed by its adjoint: one A^dagger A application of the solver.
void BM_WaveletSynthesisPair(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = static_cast<int>(state.range(1));
  const WaveletTransform w(WaveletConfig{L, N, 2.0, 0});
  const Vector a = noise(w.n_coeffs(), 5);
  for (auto _ : state) benchmark::DoNotOptimize(w.inverse_adjoint(w.inverse(a)));
}

}  // namespace

BENCHMARK(BM_SphereInverse)->RangeMultiplier(2)->Range(16, 128)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SphereForward)->RangeMultiplier(2)->Range(16, 128)->Complexity()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WignerForwardAdjoint)
    ->ArgsProduct({{16, 32, 64}, {4}})
    ->Complexity(benchmark::oNCubed)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WignerInverse)->ArgsProduct({{16, 32, 64}, {4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WaveletSynthesisPair)->ArgsProduct({{32, 64, 128}, {1, 4}})->Unit(benchmark::kMillisecond);
