#include <string>

#include <benchmark/benchmark.h>

#include "capcorpus/captions.hpp"
#include "capcorpus/normalizer.hpp"

namespace {

void BM_Normalize(benchmark::State& state) {
  const std::string raw = "Speaker 1: [laughs] I have 21 cats   AND 100 dogs, honestly!";
  for (auto _ : state) {
    benchmark::DoNotOptimize(capcorpus::normalize(raw));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * raw.size()));
}
BENCHMARK(BM_Normalize);

std::string synthetic_srt(int cues) {
  std::string out;
  char buf[128];
  for (int i = 0; i < cues; ++i) {
    const int s = i * 3;
    std::snprintf(buf, sizeof buf, "%d\n%02d:%02d:%02d,000 --> %02d:%02d:%02d,500\n", i + 1, s / 3600, s / 60 % 60,
                  s % 60, s / 3600, s / 60 % 60, s % 60 + 2);
    out += buf;
    out += "this is caption line number something\n\n";
  }
  return out;
}

void BM_ParseTrack(benchmark::State& state) {
  const auto srt = synthetic_srt(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(capcorpus::parse_track(srt));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * srt.size()));
}
BENCHMARK(BM_ParseTrack)->Arg(100)->Arg(1000);

}  // namespace
