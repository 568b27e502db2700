#include "ddag/delta_precision.hpp"
#include "ddag/diff_dag.hpp"
#include "ddag/sem.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ddag;

SemPair pair_of(int p) {
  SemPairGenConfig gen;
  gen.p = p;
  gen.seed = 42;
  return generate_sem_pair(gen);
}

void BM_GenerateSemPair(benchmark::State& state) {
  SemPairGenConfig gen;
  gen.p = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ++gen.seed;
    benchmark::DoNotOptimize(generate_sem_pair(gen));
  }
}
BENCHMARK(BM_GenerateSemPair)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_DantzigEstimate(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const SemPair pair = pair_of(p);
  const long n = 1000;
  const CovariancePair cov = CovariancePair::empirical(sample(pair.first, n, 1), sample(pair.second, n, 2));
  EstimatorConfig cfg;
  cfg.lambda_auto = true;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_dantzig(cov, cfg));
}
BENCHMARK(BM_DantzigEstimate)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_PopulationPipeline(benchmark::State& state) {
  const SemPair pair = pair_of(static_cast<int>(state.range(0)));
  const CovariancePair cov = CovariancePair::population(pair.first, pair.second);
  PipelineConfig cfg;
  cfg.estimator = EstimatorKind::population;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(cov, cfg));
}
BENCHMARK(BM_PopulationPipeline)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_SampledPipeline(benchmark::State& state) {
  const SemPair pair = pair_of(10);
  const CovariancePair cov = CovariancePair::empirical(sample(pair.first, 1000, 1), sample(pair.second, 1000, 2));
  PipelineConfig cfg;
  cfg.est.lambda_auto = true;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(cov, cfg));
}
BENCHMARK(BM_SampledPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
