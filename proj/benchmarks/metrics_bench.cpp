#include <benchmark/benchmark.h>

#include <random>

#include "symsearch/evaluation.hpp"

using namespace symsearch;

namespace {

void BM_EvaluateRun(benchmark::State& state) {
  std::mt19937 rng(4);
  std::vector<RunEntry> run;
  std::vector<Judgment> judgments;
  for (int s = 1; s <= 21; ++s) {
    for (int r = 1; r <= 1000; ++r) {
      const auto id = "d" + std::to_string(s) + "_" + std::to_string(r);
      run.push_back({s, id, r, 1.0 - r * 1e-4, "Bench"});
      if (rng() % 10 == 0) judgments.push_back({s, id, {1, static_cast<int>(rng() % 2), 1}});
    }
  }
  const auto qrels = aggregate(judgments, AggregationMode::Majority);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_run(run, qrels));
}
BENCHMARK(BM_EvaluateRun)->Unit(benchmark::kMillisecond);

void BM_ReadRun(benchmark::State& state) {
  std::vector<RunEntry> run;
  for (int s = 1; s <= 21; ++s) {
    for (int r = 1; r <= 1000; ++r) run.push_back({s, "doc" + std::to_string(r), r, 1.0 - r * 1e-4, "Bench"});
  }
  const auto text = write_run(run);
  for (auto _ : state) benchmark::DoNotOptimize(read_run(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ReadRun)->Unit(benchmark::kMillisecond);

}  // namespace
