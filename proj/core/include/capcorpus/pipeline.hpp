#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capcorpus/clients.hpp"
#include "capcorpus/config.hpp"
#include "capcorpus/filters.hpp"
#include "capcorpus/model.hpp"
#include "capcorpus/segmenter.hpp"

namespace capcorpus {

struct PipelineConfig {
  std::filesystem::path input;    // directory of <video>.json stubs, or a .jsonl candidate list
  std::filesystem::path out_dir;  // manifest directory
  std::uint64_t seed = 0;
  std::size_t workers = 4;

  FilterConfig filter;
  MergeOptions merge;
  RefineOptions refine;

  std::string asr = "echo";  // echo | garbage | failing | http
  std::string asr_url;
  std::string garbage_text = "xxxx xxxx xxxx";
  std::string aligner = "threshold";  // threshold | failing | gentle
  std::string aligner_url;
  double aligner_left_margin_s = 0.0;
  double aligner_right_margin_s = 0.0;
  std::string media = "fixture";
  std::filesystem::path media_dir;  // defaults to <input>/media

  std::filesystem::path frontier_path;  // optional; accepted channels are recorded there

  // crawl subcommand
  std::filesystem::path keywords_path;
  std::filesystem::path search_fixture;
  std::size_t crawl_rounds = 1;
  std::size_t max_videos = 0;
};

// Every key understood by pipeline_config_from (also the env override list).
const std::vector<std::string>& pipeline_config_keys();

// Throws ConfigError on unknown client kinds or bad numbers.
PipelineConfig pipeline_config_from(const ConfigValues& values);

// Loads video stubs and parses their caption files. Stubs whose captions
// cannot be parsed come back with an empty track and a note in `problems`.
struct LoadedVideos {
  std::vector<VideoRecord> videos;
  std::vector<nlohmann::json> problems;
};
LoadedVideos load_videos(const std::filesystem::path& input);

struct Clients {
  // Called once per video; the echo mock is built from that video's captions.
  std::function<std::shared_ptr<AsrClient>(const VideoRecord&)> asr_for;
  std::shared_ptr<AlignerClient> aligner;
  std::shared_ptr<MediaClient> media;
};

Clients make_clients(const PipelineConfig& cfg);

struct VideoOutcome {
  std::string video_id;
  std::size_t candidates = 0;
  std::size_t accepted_cues = 0;
  std::size_t deferred_cues = 0;
  std::map<RejectReason, std::size_t> rejected_cues;
  std::vector<ManifestEntry> entries;
  std::vector<nlohmann::json> events;
  bool deferred = false;
  std::optional<GateResult> gate;
};

// Runs filter -> gate -> merge -> refine -> cut for one video. WAV files go to
// <out_dir>/audio/<video_id>/; manifest rows are returned, not written.
VideoOutcome process_video(const VideoRecord& video, const Clients& clients, const PipelineConfig& cfg);

struct PipelineSummary {
  std::size_t videos = 0;
  std::size_t skipped_videos = 0;  // already processed in an earlier run
  std::size_t deferred_videos = 0;
  std::size_t gated_out_videos = 0;
  std::size_t candidates = 0;
  std::size_t accepted_cues = 0;
  std::size_t accepted_samples = 0;
  std::size_t deferred_cues = 0;
  std::map<RejectReason, std::size_t> rejected_cues;

  std::size_t rejected_total() const;
};

nlohmann::json to_json(const PipelineSummary& s);
std::string format_summary(const PipelineSummary& s);

// The `process` subcommand. Appends to <out_dir>/manifest.jsonl in input
// order regardless of worker count; videos already marked done in the
// provenance log are skipped.
PipelineSummary run_process(const PipelineConfig& cfg, const Clients& clients);
PipelineSummary run_process(const PipelineConfig& cfg);

}  // namespace capcorpus
