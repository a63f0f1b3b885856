#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "capcorpus/segmenter.hpp"

namespace {

void BM_MergeAdjacent(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<long long> gap(0, 2000);
  std::uniform_int_distribution<long long> len(1000, 6000);
  std::vector<capcorpus::PassingCue> cues;
  long long at = 0;
  for (int i = 0; i < state.range(0); ++i) {
    at += gap(rng);
    const auto d = len(rng);
    cues.push_back({{cues.size(), capcorpus::Millis{at}, capcorpus::Millis{at + d}, "word"}, "word"});
    at += d;
  }
  const capcorpus::MergeOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(capcorpus::merge_adjacent("v", cues, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MergeAdjacent)->Arg(100)->Arg(10000);

}  // namespace
