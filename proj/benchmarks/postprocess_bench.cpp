#include <benchmark/benchmark.h>

#include "symsearch/completion.hpp"
#include "symsearch/questionnaire.hpp"
#include "symsearch/synthgen.hpp"

using namespace symsearch;

namespace {

void BM_Postprocess(benchmark::State& state) {
  MockCompletionClient client(7);
  CompletionRequest req;
  req.prompt = build_prompt(PromptTemplate::standard(), 30, Symptom{1, "Sadness", {}},
                            ResponseOption{1, 1, "I feel sad much of the time."});
  const auto raw = client.create(req).text;
  for (auto _ : state) benchmark::DoNotOptimize(postprocess_completion(raw));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(raw.size()));
}
BENCHMARK(BM_Postprocess);

}  // namespace
