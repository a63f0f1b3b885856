#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "capcorpus/crawl.hpp"
#include "capcorpus/manifest.hpp"
#include "capcorpus/normalizer.hpp"
#include "capcorpus/pipeline.hpp"
#include "capcorpus/serialization.hpp"
#include "capcorpus/wav.hpp"
#include "fixture_corpus.hpp"

namespace capcorpus {
namespace {

using testing::read_file;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override { testing::write_fixture_corpus(corpus()); }

  std::filesystem::path corpus() const { return tmp.path() / "corpus"; }

  PipelineConfig config(const std::string& out, std::size_t workers = 4) const {
    auto cfg = pipeline_config_from({{"seed", "42"}});
    cfg.input = corpus();
    cfg.out_dir = tmp.path() / out;
    cfg.workers = workers;
    return cfg;
  }

  std::vector<nlohmann::json> provenance(const std::string& out) const {
    return read_jsonl(tmp.path() / out / "provenance.jsonl");
  }

  testing::TempDir tmp;
};

void expect_identity(const PipelineSummary& s) {
  EXPECT_EQ(s.candidates, s.accepted_cues + s.deferred_cues + s.rejected_total());
}

TEST_F(PipelineTest, FixtureCorpusOutcome) {
  auto s = run_process(config("out"));
  expect_identity(s);
  EXPECT_EQ(s.videos, 5u);
  EXPECT_EQ(s.candidates, 28u);
  EXPECT_EQ(s.accepted_samples, 12u);
  EXPECT_EQ(s.accepted_cues, 18u);
  const std::map<RejectReason, std::size_t> want = {
      {RejectReason::overlap, 2}, {RejectReason::music, 2},    {RejectReason::non_ascii, 1},
      {RejectReason::url, 2},     {RejectReason::charset, 1},  {RejectReason::duration, 1},
      {RejectReason::empty_after_normalization, 1}};
  EXPECT_EQ(s.rejected_cues, want);

  ManifestStore store(tmp.path() / "out");
  ASSERT_EQ(store.size(), 12u);
  for (const auto& e : store.entries()) {
    EXPECT_NO_THROW(validate(e));
    EXPECT_TRUE(matches_transcript_grammar(e.transcript)) << e.transcript;
    EXPECT_LE(e.duration_s, 10.0 + 1e-9);
    auto audio = wav::read_file(store.dir() / e.audio_path);
    EXPECT_EQ(audio.sample_rate, 16000u);
    EXPECT_EQ(audio.channels, 1);
    EXPECT_LE(std::llabs(static_cast<long long>(audio.frames()) - std::llround(e.duration_s * 16000)), 1);
  }
  EXPECT_EQ(store.find("vid003_0001")->transcript, "but now we exceed ten seconds");
  EXPECT_EQ(store.find("vid005_0000")->transcript, "welcome back to the show today we talk about one hundred things");

  auto st = stats(store.dir());
  EXPECT_EQ(st.samples, 12u);
  EXPECT_EQ(st.per_channel.at("chanC"), 4u);
  EXPECT_EQ(st.reject_histogram.at("overlap"), 2u);
}

TEST_F(PipelineTest, OutputIsIndependentOfWorkerCount) {
  run_process(config("w1", 1));
  run_process(config("w4", 4));
  run_process(config("w8", 8));
  for (const char* file : {"manifest.jsonl", "provenance.jsonl"}) {
    const auto ref = read_file(tmp.path() / "w1" / file);
    EXPECT_FALSE(ref.empty());
    EXPECT_EQ(read_file(tmp.path() / "w4" / file), ref) << file;
    EXPECT_EQ(read_file(tmp.path() / "w8" / file), ref) << file;
  }
  for (const auto& e : ManifestStore(tmp.path() / "w1").entries()) {
    EXPECT_EQ(read_file(tmp.path() / "w8" / e.audio_path), read_file(tmp.path() / "w1" / e.audio_path));
  }
}

TEST_F(PipelineTest, ResumeSkipsFinishedVideos) {
  const auto full = config("full");
  run_process(full);

  // First run sees only two videos, the second run sees all five.
  std::filesystem::create_directories(tmp.path() / "partial" / "media");
  for (const char* id : {"vid001", "vid002"}) {
    for (const char* ext : {".json", ".srt", ".vtt"}) {
      auto from = corpus() / (std::string(id) + ext);
      if (std::filesystem::exists(from)) std::filesystem::copy_file(from, tmp.path() / "partial" / from.filename());
    }
  }
  auto first = config("resumed");
  first.input = tmp.path() / "partial";
  first.media_dir = corpus() / "media";
  EXPECT_EQ(run_process(first).videos, 2u);

  auto second = run_process(config("resumed"));
  EXPECT_EQ(second.skipped_videos, 2u);
  EXPECT_EQ(second.videos, 3u);
  EXPECT_EQ(read_file(tmp.path() / "resumed" / "manifest.jsonl"), read_file(tmp.path() / "full" / "manifest.jsonl"));

  auto third = run_process(config("resumed"));
  EXPECT_EQ(third.skipped_videos, 5u);
  EXPECT_EQ(third.videos, 0u);
  EXPECT_EQ(ManifestStore(tmp.path() / "resumed").size(), 12u);
}

TEST_F(PipelineTest, ResumeAfterTornManifestWrite) {
  run_process(config("torn"));
  const auto manifest = tmp.path() / "torn" / "manifest.jsonl";
  {
    std::ofstream out(manifest, std::ios::app);
    out << R"({"sample_id":"vid009_0000","audio)";
  }
  auto s = run_process(config("torn"));
  EXPECT_EQ(s.skipped_videos, 5u);
  EXPECT_EQ(ManifestStore(tmp.path() / "torn").size(), 12u);
}

TEST_F(PipelineTest, RetryableAsrFailureDefersVideos) {
  auto cfg = config("deferred");
  auto clients = make_clients(cfg);
  clients.asr_for = [](const VideoRecord&) { return std::make_shared<FailingAsrClient>(ClientErrorKind::unavailable); };
  auto s = run_process(cfg, clients);
  expect_identity(s);
  EXPECT_EQ(s.deferred_videos, 5u);
  EXPECT_EQ(s.accepted_samples, 0u);
  EXPECT_EQ(s.deferred_cues, 18u);
  for (const auto& ev : provenance("deferred")) EXPECT_NE(ev["event"], "video_done");
  EXPECT_EQ(stats(tmp.path() / "deferred").deferred_cues, 18u);

  // The ASR backend comes back; every video is processed on the next run.
  auto again = run_process(cfg);
  EXPECT_EQ(again.skipped_videos, 0u);
  EXPECT_EQ(again.accepted_samples, 12u);
}

TEST_F(PipelineTest, FatalAsrFailureDropsVideo) {
  auto cfg = config("fatal");
  auto clients = make_clients(cfg);
  clients.asr_for = [](const VideoRecord&) { return std::make_shared<FailingAsrClient>(ClientErrorKind::bad_response); };
  auto s = run_process(cfg, clients);
  expect_identity(s);
  EXPECT_EQ(s.deferred_videos, 0u);
  EXPECT_EQ(s.accepted_samples, 0u);
  EXPECT_EQ(s.rejected_cues.at(RejectReason::similarity_gate), 18u);
}

TEST_F(PipelineTest, GarbageAsrGatesOutEveryVideo) {
  auto values = ConfigValues{{"seed", "42"}, {"asr", "garbage"}};
  auto cfg = pipeline_config_from(values);
  cfg.input = corpus();
  cfg.out_dir = tmp.path() / "garbage";
  auto s = run_process(cfg);
  expect_identity(s);
  EXPECT_EQ(s.gated_out_videos, 5u);
  EXPECT_EQ(s.accepted_samples, 0u);
  EXPECT_EQ(ManifestStore(cfg.out_dir).size(), 0u);
  std::size_t gates = 0;
  for (const auto& ev : provenance("garbage")) {
    if (ev["event"] == "gate") {
      ++gates;
      EXPECT_FALSE(ev["passed"].get<bool>());
      EXPECT_LT(ev["score"].get<double>(), 0.7);
    }
  }
  EXPECT_EQ(gates, 5u);
}

TEST_F(PipelineTest, MissingMediaRejectsCues) {
  std::filesystem::remove(corpus() / "media" / "vid003.wav");
  auto s = run_process(config("media"));
  expect_identity(s);
  EXPECT_EQ(s.rejected_cues.at(RejectReason::media_unavailable), 5u);
  EXPECT_EQ(s.accepted_samples, 8u);
}

TEST_F(PipelineTest, AlignerMarginsWidenBoundaries) {
  auto cfg = pipeline_config_from({{"seed", "42"}, {"aligner_left_margin_s", "0.3"}, {"aligner_right_margin_s", "0.6"}});
  cfg.input = corpus();
  cfg.out_dir = tmp.path() / "margins";
  run_process(cfg);
  ManifestStore store(cfg.out_dir);
  auto e = store.find("vid003_0002");
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->start_s, 13.7, 1e-9);
  EXPECT_NEAR(e->end_s, 16.0, 1e-9);
  EXPECT_EQ(wav::read_file(store.dir() / e->audio_path).frames(), 36800u);
}

TEST_F(PipelineTest, AlignerOutageStillAccepts) {
  auto cfg = pipeline_config_from({{"seed", "42"}, {"aligner", "failing"}});
  cfg.input = corpus();
  cfg.out_dir = tmp.path() / "noalign";
  auto s = run_process(cfg);
  EXPECT_EQ(s.accepted_samples, 12u);
  bool warned = false;
  for (const auto& ev : provenance("noalign")) {
    if (ev["event"] == "accepted") {
      for (const auto& w : ev["warnings"]) warned |= w == "alignment_unavailable";
    }
  }
  EXPECT_TRUE(warned);
}

TEST_F(PipelineTest, CaptionProblemsAreLogged) {
  {
    std::ofstream out(corpus() / "vid006.json");
    out << R"({"video_id": "vid006", "channel_id": "chanD", "title": "t", "duration_s": 10, "captions": "vid006.srt"})";
  }
  {
    std::ofstream out(corpus() / "vid006.srt", std::ios::binary);
    out << "\xFF\xFE not utf8";
  }
  auto s = run_process(config("problems"));
  EXPECT_EQ(s.videos, 6u);
  bool unparseable = false;
  bool warning = false;
  for (const auto& ev : provenance("problems")) {
    unparseable |= ev["event"] == "unparseable" && ev["video_id"] == "vid006";
    warning |= ev["event"] == "caption_warning" && ev["video_id"] == "vid005";
  }
  EXPECT_TRUE(unparseable);
  EXPECT_TRUE(warning);
}

TEST_F(PipelineTest, JsonlCandidateListInput) {
  {
    std::ofstream out(corpus() / "candidates.jsonl");
    for (const auto& v : testing::fixture_videos()) {
      nlohmann::json stub = {{"video_id", v.id},
                             {"channel_id", v.channel},
                             {"title", "t"},
                             {"duration_s", v.duration_s},
                             {"captions", v.id + (v.webvtt ? ".vtt" : ".srt")}};
      out << stub.dump() << "\n";
    }
  }
  auto cfg = config("jsonl");
  cfg.input = corpus() / "candidates.jsonl";
  run_process(cfg);
  run_process(config("dir"));
  EXPECT_EQ(read_file(tmp.path() / "jsonl" / "manifest.jsonl"), read_file(tmp.path() / "dir" / "manifest.jsonl"));
}

TEST_F(PipelineTest, AcceptedChannelsReachTheFrontier) {
  auto cfg = config("frontier");
  cfg.frontier_path = tmp.path() / "frontier.json";
  CrawlFrontier({"the"}).save(cfg.frontier_path);
  run_process(cfg);
  auto f = CrawlFrontier::load(cfg.frontier_path);
  EXPECT_EQ(f->channel_memory(), (std::set<std::string>{"chanA", "chanB", "chanC"}));
}

TEST_F(PipelineTest, EmptyInputDirectoryIsFine) {
  std::filesystem::create_directories(tmp.path() / "empty");
  auto cfg = config("empty-out");
  cfg.input = tmp.path() / "empty";
  auto s = run_process(cfg);
  EXPECT_EQ(s.videos, 0u);
  EXPECT_THROW(load_videos(tmp.path() / "absent"), IoError);
}

TEST_F(PipelineTest, CuesPastMediaEndAreClamped) {
  {
    std::ofstream out(corpus() / "vid004.json");
    out << R"({"video_id": "vid004", "channel_id": "chanC", "title": "t", "duration_s": 17, "captions": "vid004.vtt"})";
  }
  auto loaded = load_videos(corpus());
  const auto& v = loaded.videos[3];
  ASSERT_EQ(v.video_id, "vid004");
  EXPECT_EQ(v.caption_track.back().end, Millis{17000});
}

}  // namespace
}  // namespace capcorpus
