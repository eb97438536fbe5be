#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "tssynth/loss.hpp"
#include "tssynth/matrix_profile.hpp"

namespace {

tssynth::TimeSeries random_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double acc = 0.0;
  for (double& x : v) x = acc += g(rng);
  return tssynth::TimeSeries(std::move(v));
}

void BM_MpBruteForce(benchmark::State& state) {
  const auto s = random_walk(static_cast<std::size_t>(state.range(0)), 1);
  const auto cfg = tssynth::WindowConfig::with_default_exclusion(50);
  for (auto _ : state) benchmark::DoNotOptimize(tssynth::mp_brute_force(s, cfg));
  state.SetComplexityN(state.range(0));
}

// range(1) is the OpenMP thread count.
void BM_MpFast(benchmark::State& state) {
  const auto s = random_walk(static_cast<std::size_t>(state.range(0)), 1);
  const auto cfg = tssynth::WindowConfig::with_default_exclusion(50);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(tssynth::mp_fast(s, cfg));
  omp_set_num_threads(saved);
  state.SetComplexityN(state.range(0));
}

void BM_BatchGradient(benchmark::State& state) {
  const auto original = random_walk(5000, 2);
  const auto synth = random_walk(5000, 3);
  const auto cfg = tssynth::WindowConfig::with_default_exclusion(50);
  const auto mp = tssynth::mp_fast(original, cfg);
  std::mt19937_64 rng(4);
  const auto triples = tssynth::sample_triples(mp, static_cast<std::size_t>(state.range(0)), rng);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  tssynth::GradientBuffer gradient;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tssynth::batch_loss_and_gradient(
        original, synth, triples, tssynth::LossWeights{}, cfg, gradient));
  }
  omp_set_num_threads(saved);
}

// One thread and, on multicore machines, every available thread.
std::vector<std::int64_t> thread_counts() {
  const int max = omp_get_max_threads();
  return max > 1 ? std::vector<std::int64_t>{1, max} : std::vector<std::int64_t>{1};
}

}  // namespace

BENCHMARK(BM_MpBruteForce)->Arg(1000)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MpFast)
    ->ArgsProduct({{1000, 2000, 4000, 16000}, thread_counts()})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)
    ->ArgsProduct({{64, 512}, thread_counts()})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
