#include <benchmark/benchmark.h>
#include <omp.h>

#include "feedaudit/baselines.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/simulator.hpp"

using namespace feedaudit;

namespace {

const Cohort& cohort() {
  static const Cohort c = [] {
    PlatformConfig p;
    p.seed = 7;
    return generate_cohort({bot_policy("bot4"), bot_policy("bot3")}, p, 20, 1000, 11);
  }();
  return c;
}

const EncodedDataset& encoded() {
  static const EncodedDataset e = encode(cohort().dataset);
  return e;
}

const FeatureSet& features() {
  static const FeatureSet f = make_feature_set(default_feature_names(), 50);
  return f;
}

void BM_LabelReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(label_dataset_serial(encoded(), features()));
}

void BM_LabelIndexedSerial(benchmark::State& state) {
  for (auto _ : state) {
    LabeledDataset out;
    for (const auto& t : encoded().timelines) out.timelines.push_back(label_timeline(t, features()));
    benchmark::DoNotOptimize(out);
  }
}

void BM_LabelIndexedParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(label_dataset(encoded(), features()));
}

void BM_ScoreSampled(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto labels = label_dataset(encoded(), features());
  PersonalizationScorer scorer(encoded(), features(), labels);
  ScoreOptions o;
  o.sample_size = 10;
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score_all(o));
}

void BM_NoiseFloor(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  RandomizationOptions o{4, 3, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(noise_floor(cohort().dataset, features(), 50, o));
}

}  // namespace

BENCHMARK(BM_LabelReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelIndexedSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelIndexedParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSampled)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseFloor)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
