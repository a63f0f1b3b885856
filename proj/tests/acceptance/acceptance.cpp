// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "capcorpus/filters.hpp"
#include "capcorpus/manifest.hpp"
#include "capcorpus/metrics.hpp"
#include "capcorpus/normalizer.hpp"
#include "capcorpus/pipeline.hpp"
#include "capcorpus/segmenter.hpp"
#include "capcorpus/wav.hpp"
#include "fixture_corpus.hpp"
#include "oracles.hpp"

namespace cc = capcorpus;
namespace ct = capcorpus::testing;

namespace {

constexpr double kWerTolerance = 1e-12;
constexpr long long kBoundaryToleranceMs = 1;
constexpr long long kFrameTolerance = 1;
constexpr double kOracleBudgetS = 60.0;
constexpr double kMergeBudgetS = 10.0;
constexpr std::size_t kOraclePairs = 10000;
constexpr std::size_t kMergeTracks = 1000;

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Full-matrix edit distance, written independently of the library.
std::size_t matrix_edit_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

double oracle_similarity(const std::string& a, const std::string& b) {
  // Transcripts are ASCII after normalization.
  const std::u32string ua(a.begin(), a.end()), ub(b.begin(), b.end());
  const auto longest = std::max(ua.size(), ub.size());
  return longest == 0 ? 1.0 : 1.0 - static_cast<double>(matrix_edit_distance(ua, ub)) / longest;
}

void metrics_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(20261016);
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_int_distribution<int> sym(0, 2);
  const std::string symbols[] = {"a", "b", "c"};
  auto gen = [&] {
    std::vector<std::string> s(len(rng));
    for (auto& t : s) t = symbols[sym(rng)];
    return s;
  };
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kOraclePairs; ++i) {
    const auto ref = gen();
    const auto hyp = gen();
    const auto want = ct::exhaustive_alignment(ref, hyp);
    const auto got = cc::align_tokens(ref, hyp);
    if (!(got == want.counts) || got.errors() != want.cost) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  report(mismatches == 0 && elapsed < kOracleBudgetS, "metrics_oracle_equivalence",
         fmt("%zu random pairs (len<=5, 3 symbols), %zu mismatches, %.2f s (budget %.0f s)", kOraclePairs, mismatches,
             elapsed, kOracleBudgetS));
}

std::string words(const std::string& stem, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += stem + static_cast<char>('a' + i / 26) + static_cast<char>('a' + i % 26);
  }
  return s;
}

// Builds a review log whose pooled counts are exactly (S, D, I, C) and
// returns the store's running estimate and the estimate recomputed from disk.
struct LogResult {
  cc::ReviewEstimate running;
  cc::ReviewEstimate recomputed;
};

LogResult synthetic_review_log(const std::filesystem::path& dir, int s, int d, int ins, int c) {
  cc::ManifestStore store(dir);
  int ordinal = 0;
  auto add = [&](const std::string& crawled, const std::optional<std::string>& correction) {
    char id[32];
    std::snprintf(id, sizeof id, "syn_%04d", ordinal++);
    store.append({id, cc::ManifestStore::audio_relpath("syn", id), crawled, 1.0, "syn", "ch", 0.0, 1.0,
                  std::string(cc::kPipelineVersion)});
    cc::ReviewVerdict v{id, correction ? cc::Verdict::corrected : cc::Verdict::confirmed, correction, "acceptance",
                        "2026-10-16T00:00:00Z"};
    store.record_verdict(v);
  };
  // One sample per substitution, deletion and insertion; each has 4 correct
  // words around its error. Confirmed samples make up the remaining correct words.
  const int context = 4;
  for (int k = 0; k < s; ++k) {
    add(words("s" + std::to_string(k), context) + " wrong", words("s" + std::to_string(k), context) + " right");
  }
  for (int k = 0; k < d; ++k) {
    add(words("d" + std::to_string(k), context), words("d" + std::to_string(k), context) + " dropped");
  }
  for (int k = 0; k < ins; ++k) {
    add(words("i" + std::to_string(k), context) + " extra", words("i" + std::to_string(k), context));
  }
  int remaining = c - context * (s + d + ins);
  for (int k = 0; remaining > 0; ++k) {
    const int n = std::min(remaining, 10);
    add(words("c" + std::to_string(k), n), std::nullopt);
    remaining -= n;
  }
  return {store.review_estimate(), store.recompute_review_estimate()};
}

void wer_formula() {
  const double direct = cc::wer(cc::EditCounts{2, 1, 1, 96});
  const double expected = 4.0 / 99.0;
  ct::TempDir tmp("capcorpus-accept");
  const auto log = synthetic_review_log(tmp.path(), 2, 1, 1, 96);
  const auto& counts = log.running.counts;
  const bool counts_ok = counts == cc::EditCounts{2, 1, 1, 96} && log.recomputed.counts == counts;
  const double pooled = log.running.pooled_wer.value_or(-1.0);
  const bool ok = std::abs(direct - expected) <= kWerTolerance && counts_ok &&
                  std::abs(pooled - expected) <= kWerTolerance &&
                  std::abs(log.recomputed.pooled_wer.value_or(-1.0) - expected) <= kWerTolerance;
  report(ok, "wer_formula",
         fmt("wer(S=2,D=1,I=1,C=96)=%.15f, pooled over %zu-verdict log=%.15f, 4/99=%.15f (tol %.0e)", direct,
             log.running.reviewed, pooled, expected, kWerTolerance));
}

void filter_battery() {
  const auto track = ct::battery_track();
  const auto& battery = ct::filter_battery();
  std::map<std::string, int> per_label;
  int wrong = 0;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto v = cc::filter_cue(track.cues[i], track, cc::FilterConfig{});
    if (v.reason != battery[i].expected) {
      ++wrong;
      std::printf("      misclassified: \"%s\"\n", battery[i].text.c_str());
    }
    ++per_label[battery[i].expected ? std::string(cc::to_string(*battery[i].expected)) : "clean"];
  }
  bool coverage = per_label["clean"] >= 5;
  for (const char* r : {"overlap", "music", "non_ascii", "url", "charset", "duration"}) coverage &= per_label[r] >= 2;
  std::string detail = fmt("%zu labeled cues, %d misclassified;", battery.size(), wrong);
  for (const auto& [label, n] : per_label) detail += fmt(" %s=%d", label.c_str(), n);
  report(wrong == 0 && coverage, "filter_battery", detail);
}

cc::PipelineConfig fixture_config(const std::filesystem::path& corpus, const std::filesystem::path& out) {
  auto cfg = cc::pipeline_config_from({{"seed", "42"}});
  cfg.input = corpus;
  cfg.out_dir = out;
  return cfg;
}

void similarity_gate() {
  ct::TempDir tmp("capcorpus-accept");
  const auto corpus = tmp.path() / "corpus";
  const auto ids = ct::write_fixture_corpus(corpus);

  auto echo_cfg = fixture_config(corpus, tmp.path() / "echo");
  const auto echo = cc::run_process(echo_cfg);
  std::size_t echo_passed = 0;
  for (const auto& ev : cc::read_jsonl(echo_cfg.out_dir / "provenance.jsonl")) {
    if (ev["event"] == "gate" && ev["passed"].get<bool>()) ++echo_passed;
  }

  // Garbage ASR everywhere; the oracle recomputes every probe's similarity.
  auto garbage_cfg = fixture_config(corpus, tmp.path() / "garbage");
  garbage_cfg.asr = "garbage";
  const auto garbage = cc::run_process(garbage_cfg);
  const auto loaded = cc::load_videos(corpus);
  std::size_t garbage_rejected = 0;
  bool oracle_agrees = true;
  for (const auto& ev : cc::read_jsonl(garbage_cfg.out_dir / "provenance.jsonl")) {
    if (ev["event"] != "gate") continue;
    const auto& video = *std::find_if(loaded.videos.begin(), loaded.videos.end(),
                                      [&](const cc::VideoRecord& v) { return v.video_id == ev["video_id"]; });
    double sum = 0.0;
    const auto& probes = ev["probe_cues"];
    for (const auto& p : probes) {
      const auto caption = cc::normalize(video.caption_track[p.get<std::size_t>()].raw_text);
      sum += oracle_similarity(caption, cc::normalize(garbage_cfg.garbage_text));
    }
    const double mean = sum / static_cast<double>(probes.size());
    oracle_agrees &= std::abs(mean - ev["score"].get<double>()) < 1e-12 && mean < 0.70;
    if (!ev["passed"].get<bool>()) ++garbage_rejected;
  }
  const bool garbage_empty = cc::ManifestStore(garbage_cfg.out_dir).size() == 0;

  // Mixed run: two videos get garbage ASR; none of their cues may reach the manifest.
  auto mixed_cfg = fixture_config(corpus, tmp.path() / "mixed");
  auto clients = cc::make_clients(mixed_cfg);
  const std::set<std::string> bad = {"vid002", "vid004"};
  auto echo_factory = clients.asr_for;
  clients.asr_for = [&](const cc::VideoRecord& v) -> std::shared_ptr<cc::AsrClient> {
    if (bad.contains(v.video_id)) return std::make_shared<cc::GarbageAsrClient>();
    return echo_factory(v);
  };
  const auto mixed = cc::run_process(mixed_cfg, clients);
  std::size_t leaked = 0;
  for (const auto& e : cc::ManifestStore(mixed_cfg.out_dir).entries()) leaked += bad.contains(e.video_id);

  const bool ok = echo_passed == ids.size() && echo.gated_out_videos == 0 && garbage_rejected == ids.size() &&
                  garbage.gated_out_videos == ids.size() && oracle_agrees && garbage_empty &&
                  mixed.gated_out_videos == bad.size() && leaked == 0 && mixed.accepted_samples > 0;
  report(ok, "similarity_gate",
         fmt("echo passed %zu/%zu; garbage rejected %zu/%zu (oracle mean<0.70: %s, manifest rows %zu); "
             "mixed run: %zu rows from gated-out videos",
             echo_passed, ids.size(), garbage_rejected, ids.size(), oracle_agrees ? "yes" : "no",
             cc::ManifestStore(garbage_cfg.out_dir).size(), leaked));
}

void merge_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> count(0, 60);
  std::uniform_int_distribution<long long> gap(0, 2000);
  std::uniform_int_distribution<long long> len(1000, 10000);
  const cc::MergeOptions opts;
  std::size_t too_long = 0, wide_gap = 0, order_broken = 0, utterances = 0;
  for (std::size_t t = 0; t < kMergeTracks; ++t) {
    std::vector<cc::PassingCue> cues;
    long long at = 0;
    for (int i = count(rng); i > 0; --i) {
      at += gap(rng);
      const auto d = len(rng);
      cues.push_back({{cues.size(), cc::Millis{at}, cc::Millis{at + d}, "c"}, "c"});
      at += d;
    }
    const auto merged = cc::merge_adjacent("v", cues, opts);
    utterances += merged.size();
    std::vector<std::size_t> concat;
    for (const auto& u : merged) {
      if (u.duration() > cc::Millis{10000}) ++too_long;
      for (std::size_t k = 1; k < u.cue_indices.size(); ++k) {
        if (cues[u.cue_indices[k]].cue.start - cues[u.cue_indices[k - 1]].cue.end >= cc::Millis{1000}) ++wide_gap;
      }
      concat.insert(concat.end(), u.cue_indices.begin(), u.cue_indices.end());
    }
    for (std::size_t i = 0; i < concat.size(); ++i) order_broken += concat[i] != i;
    if (concat.size() != cues.size()) ++order_broken;
  }
  const double elapsed = seconds_since(t0);
  report(too_long == 0 && wide_gap == 0 && order_broken == 0 && elapsed < kMergeBudgetS, "merge_properties",
         fmt("%zu tracks, %zu utterances: >10 s %zu, gaps >=1 s %zu, index order violations %zu, %.2f s (budget %.0f s)",
             kMergeTracks, utterances, too_long, wide_gap, order_broken, elapsed, kMergeBudgetS));
}

void boundary_refinement() {
  cc::VideoRecord video;
  video.video_id = "v";
  video.audio_ref = "v.wav";
  video.duration = cc::Millis{60000};
  const std::vector<std::pair<long long, long long>> spans = {{5000, 8000}, {12340, 15678}, {20001, 29999}, {40000, 41000}};

  long long worst_in_reach = 0;
  long long worst_beyond = 0;
  for (auto [s, e] : spans) {
    cc::Utterance u;
    u.source_video = "v";
    u.start = cc::Millis{s};
    u.end = cc::Millis{e};
    u.transcript = "one two three four five";
    u.status = cc::Status::merged;

    cc::ThresholdAlignerClient near(cc::Millis{300}, cc::Millis{300});
    const auto r1 = cc::refine_boundaries(u, video, near);
    worst_in_reach = std::max({worst_in_reach, std::llabs(r1.start.count() - (s - 300)),
                               std::llabs(r1.end.count() - (e + 300))});

    cc::ThresholdAlignerClient far(cc::Millis{600}, cc::Millis{600});
    const auto r2 = cc::refine_boundaries(u, video, far);
    worst_beyond = std::max({worst_beyond, std::llabs(r2.start.count() - s), std::llabs(r2.end.count() - e)});
  }
  report(worst_in_reach <= kBoundaryToleranceMs && worst_beyond == 0, "boundary_refinement",
         fmt("margin 0.3 s: max |refined - (original -/+ 0.3 s)| = %lld ms (tol %lld); margin 0.6 s: max shift %lld ms "
             "(must be 0)",
             worst_in_reach, kBoundaryToleranceMs, worst_beyond));
}

void end_to_end_determinism() {
  ct::TempDir tmp("capcorpus-accept");
  const auto corpus = tmp.path() / "corpus";
  ct::write_fixture_corpus(corpus);
  auto first = fixture_config(corpus, tmp.path() / "run1");
  auto second = fixture_config(corpus, tmp.path() / "run2");
  second.workers = 1;
  cc::run_process(first);
  cc::run_process(second);

  const auto m1 = ct::read_file(first.out_dir / "manifest.jsonl");
  const auto m2 = ct::read_file(second.out_dir / "manifest.jsonl");
  const bool identical = !m1.empty() && m1 == m2 &&
                         ct::read_file(first.out_dir / "provenance.jsonl") ==
                             ct::read_file(second.out_dir / "provenance.jsonl");

  long long worst = 0;
  std::size_t files = 0;
  bool audio_identical = true;
  for (const auto& e : cc::ManifestStore(first.out_dir).entries()) {
    const auto audio = cc::wav::read_file(first.out_dir / e.audio_path);
    worst = std::max(worst, std::llabs(static_cast<long long>(audio.frames()) - std::llround(e.duration_s * 16000.0)));
    audio_identical &= ct::read_file(first.out_dir / e.audio_path) == ct::read_file(second.out_dir / e.audio_path);
    ++files;
  }
  report(identical && audio_identical && worst <= kFrameTolerance && files > 0, "end_to_end_determinism",
         fmt("5 videos, seed 42, two runs (4 and 1 workers): manifest %zu bytes %s; %zu WAVs, "
             "max |frames - round(duration*16000)| = %lld (tol %lld)",
             m1.size(), identical ? "byte-identical" : "DIFFERENT", files, worst, kFrameTolerance));
}

void review_estimate_procedure() {
  std::printf("NOTE  %-28s %s\n", "out_of_scope",
              "not reproduced at desk scale: hours-per-day crawl throughput, transcription error measured on live "
              "video data, and downstream recognizer training results (live services and GPU training needed); "
              "the estimation procedure is checked instead");
  // S+D+I = 21 and S+D+C = 600.
  ct::TempDir tmp("capcorpus-accept");
  const auto log = synthetic_review_log(tmp.path(), 9, 6, 6, 585);
  const auto& c = log.running.counts;
  const double est = log.running.pooled_wer.value_or(-1.0);
  const bool ok = c.errors() == 21 && c.reference_length() == 600 && std::abs(est - 0.035) <= kWerTolerance &&
                  log.recomputed.counts == c;
  report(ok, "review_estimate_procedure",
         fmt("synthetic log of %zu verdicts: S=%lld D=%lld I=%lld C=%lld, estimate %.12f (expected 0.035, tol %.0e)",
             log.running.reviewed, static_cast<long long>(c.substitutions), static_cast<long long>(c.deletions),
             static_cast<long long>(c.insertions), static_cast<long long>(c.correct), est, kWerTolerance));
}

}  // namespace

int main() {
  const auto guard = [](const char* name, void (*check)()) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  };
  guard("metrics_oracle_equivalence", metrics_oracle);
  guard("wer_formula", wer_formula);
  guard("filter_battery", filter_battery);
  guard("similarity_gate", similarity_gate);
  guard("merge_properties", merge_properties);
  guard("boundary_refinement", boundary_refinement);
  guard("end_to_end_determinism", end_to_end_determinism);
  guard("review_estimate_procedure", review_estimate_procedure);
  std::printf("%s: %d failing\n", failures == 0 ? "ACCEPTED" : "NOT ACCEPTED", failures);
  return failures == 0 ? 0 : 1;
}
