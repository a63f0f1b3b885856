#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "capcorpus/filters.hpp"
#include "capcorpus/metrics.hpp"

namespace {

std::vector<std::string> random_words(std::size_t n, std::mt19937& rng) {
  static const char* vocab[] = {"the", "cat", "sat", "on", "a", "mat", "and", "then", "it", "left"};
  std::uniform_int_distribution<int> pick(0, 9);
  std::vector<std::string> out(n);
  for (auto& w : out) w = vocab[pick(rng)];
  return out;
}

void BM_AlignTokens(benchmark::State& state) {
  std::mt19937 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ref = random_words(n, rng);
  const auto hyp = random_words(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(capcorpus::align_tokens(ref, hyp));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AlignTokens)->RangeMultiplier(4)->Range(8, 512)->Complexity(benchmark::oNSquared);

void BM_Similarity(benchmark::State& state) {
  const std::string a = "we will be back in five minutes after the news";
  const std::string b = "we'll be back in five minutes after this news";
  for (auto _ : state) {
    benchmark::DoNotOptimize(capcorpus::similarity(a, b));
  }
}
BENCHMARK(BM_Similarity);

}  // namespace
