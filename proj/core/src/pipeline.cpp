#include "capcorpus/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "capcorpus/captions.hpp"
#include "capcorpus/crawl.hpp"
#include "capcorpus/manifest.hpp"
#include "capcorpus/serialization.hpp"

namespace capcorpus {

namespace {

double to_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
}

std::uint64_t to_count(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used);
    if (used != text.size() || text.starts_with('-')) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + text + "'");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

const std::vector<std::string>& pipeline_config_keys() {
  static const std::vector<std::string> keys = {
      "input",        "out",           "seed",         "workers",
      "min_duration_s", "max_duration_s", "similarity_threshold", "probe_count",
      "gate_aggregate", "asr",           "asr_url",      "garbage_text",
      "aligner",      "aligner_url",   "aligner_left_margin_s", "aligner_right_margin_s",
      "media",        "media_dir",     "frontier",     "keywords",
      "search_fixture", "crawl_rounds", "max_videos",
  };
  return keys;
}

PipelineConfig pipeline_config_from(const ConfigValues& values) {
  PipelineConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  if (auto v = get("input")) cfg.input = *v;
  if (auto v = get("out")) cfg.out_dir = *v;
  if (auto v = get("seed")) cfg.seed = to_count("seed", *v);
  if (auto v = get("workers")) {
    cfg.workers = to_count("workers", *v);
    if (cfg.workers == 0) throw ConfigError("workers must be positive");
  }

  cfg.filter = filter_config_from(values);
  cfg.filter.rng_seed = cfg.seed;

  if (auto v = get("asr")) cfg.asr = *v;
  if (auto v = get("asr_url")) cfg.asr_url = *v;
  if (auto v = get("garbage_text")) cfg.garbage_text = *v;
  if (auto v = get("aligner")) cfg.aligner = *v;
  if (auto v = get("aligner_url")) cfg.aligner_url = *v;
  if (auto v = get("aligner_left_margin_s")) cfg.aligner_left_margin_s = to_number("aligner_left_margin_s", *v);
  if (auto v = get("aligner_right_margin_s")) cfg.aligner_right_margin_s = to_number("aligner_right_margin_s", *v);
  if (auto v = get("media")) cfg.media = *v;
  if (auto v = get("media_dir")) cfg.media_dir = *v;
  if (auto v = get("frontier")) cfg.frontier_path = *v;
  if (auto v = get("keywords")) cfg.keywords_path = *v;
  if (auto v = get("search_fixture")) cfg.search_fixture = *v;
  if (auto v = get("crawl_rounds")) cfg.crawl_rounds = to_count("crawl_rounds", *v);
  if (auto v = get("max_videos")) cfg.max_videos = to_count("max_videos", *v);

  static const std::set<std::string> asr_kinds = {"echo", "garbage", "failing", "http"};
  static const std::set<std::string> aligner_kinds = {"threshold", "failing", "gentle"};
  if (!asr_kinds.contains(cfg.asr)) throw ConfigError("unknown asr client '" + cfg.asr + "'");
  if (!aligner_kinds.contains(cfg.aligner)) throw ConfigError("unknown aligner client '" + cfg.aligner + "'");
  if (cfg.media != "fixture") throw ConfigError("unknown media client '" + cfg.media + "'");
  if (cfg.asr == "http" && cfg.asr_url.empty()) throw ConfigError("asr = http requires asr_url");
  if (cfg.aligner == "gentle" && cfg.aligner_url.empty()) throw ConfigError("aligner = gentle requires aligner_url");
  if (cfg.aligner_left_margin_s < 0 || cfg.aligner_right_margin_s < 0) {
    throw ConfigError("aligner margins must be non-negative");
  }
  return cfg;
}

LoadedVideos load_videos(const std::filesystem::path& input) {
  std::error_code ec;
  if (!std::filesystem::exists(input, ec)) throw IoError("input '" + input.string() + "' does not exist");

  LoadedVideos loaded;
  std::vector<VideoRecord> stubs;
  if (std::filesystem::is_directory(input)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto j = nlohmann::json::parse(read_text(f), nullptr, false);
      if (j.is_discarded()) throw Error(f.string() + ": not valid JSON");
      auto v = video_stub_from_json(j, input);
      if (v.caption_ref.empty()) {
        for (const char* ext : {".srt", ".vtt"}) {
          auto candidate = input / (v.video_id + ext);
          if (std::filesystem::exists(candidate)) {
            v.caption_ref = candidate.string();
            break;
          }
        }
      }
      stubs.push_back(std::move(v));
    }
  } else {
    for (const auto& row : read_jsonl(input)) stubs.push_back(video_stub_from_json(row, input.parent_path()));
  }

  std::set<std::string> ids;
  for (auto& v : stubs) {
    if (!ids.insert(v.video_id).second) throw Error("duplicate video_id '" + v.video_id + "' in input");
    try {
      if (v.caption_ref.empty()) throw ParseError("no caption file");
      std::optional<CaptionFormat> hint;
      if (v.caption_ref.ends_with(".vtt")) hint = CaptionFormat::webvtt;
      if (v.caption_ref.ends_with(".srt")) hint = CaptionFormat::srt;
      auto track = parse_track(read_text(v.caption_ref), hint);
      std::vector<CaptionCue> cues;
      for (auto& cue : track.cues) {
        if (v.duration > Millis{0} && cue.end > v.duration) {
          cue.end = v.duration;
          if (cue.end <= cue.start) {
            loaded.problems.push_back({{"event", "cue_outside_media"}, {"video_id", v.video_id}, {"cue", cue.index}});
            continue;
          }
        }
        cues.push_back(std::move(cue));
      }
      for (std::size_t i = 0; i < cues.size(); ++i) cues[i].index = i;
      v.caption_track = std::move(cues);
      for (const auto& w : track.warnings) {
        loaded.problems.push_back({{"event", "caption_warning"},
                                   {"video_id", v.video_id},
                                   {"block", w.block},
                                   {"kind", to_string(w.kind)}});
      }
    } catch (const Error& e) {
      loaded.problems.push_back({{"event", "unparseable"}, {"video_id", v.video_id}, {"error", e.what()}});
      v.caption_track.clear();
    }
    loaded.videos.push_back(std::move(v));
  }
  return loaded;
}

Clients make_clients(const PipelineConfig& cfg) {
  Clients c;
  if (cfg.asr == "echo") {
    c.asr_for = [](const VideoRecord& video) {
      auto echo = std::make_shared<EchoAsrClient>();
      for (const auto& cue : video.caption_track) echo->add({video.audio_ref, cue.start, cue.end}, cue.raw_text);
      return std::shared_ptr<AsrClient>(echo);
    };
  } else {
    std::shared_ptr<AsrClient> shared;
    if (cfg.asr == "garbage") shared = std::make_shared<GarbageAsrClient>(cfg.garbage_text);
    if (cfg.asr == "failing") shared = std::make_shared<FailingAsrClient>();
    if (cfg.asr == "http") shared = std::make_shared<HttpAsrClient>(cfg.asr_url);
    c.asr_for = [shared](const VideoRecord&) { return shared; };
  }

  if (cfg.aligner == "threshold") {
    c.aligner = std::make_shared<ThresholdAlignerClient>(from_seconds(cfg.aligner_left_margin_s),
                                                         from_seconds(cfg.aligner_right_margin_s));
  } else if (cfg.aligner == "failing") {
    c.aligner = std::make_shared<FailingAlignerClient>();
  } else {
    c.aligner = std::make_shared<GentleAlignerClient>(cfg.aligner_url);
  }

  auto media_dir = cfg.media_dir;
  if (media_dir.empty()) {
    media_dir = std::filesystem::is_directory(cfg.input) ? cfg.input / "media" : cfg.input.parent_path() / "media";
  }
  c.media = std::make_shared<FixtureMediaClient>(media_dir);
  return c;
}

namespace {

nlohmann::json rejected_event(const std::string& video_id, RejectReason reason, const std::vector<std::size_t>& cues) {
  return {{"event", "rejected"},
          {"video_id", video_id},
          {"reason", to_string(reason)},
          {"cue_count", cues.size()},
          {"cue_indices", cues}};
}

std::string sample_id_for(const std::string& video_id, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu", ordinal);
  return video_id + buf;
}

}  // namespace

VideoOutcome process_video(const VideoRecord& input, const Clients& clients, const PipelineConfig& cfg) {
  VideoOutcome out;
  out.video_id = input.video_id;
  VideoRecord video = input;
  const auto& cues = video.caption_track;
  out.candidates = cues.size();

  auto reject = [&](RejectReason reason, const std::vector<std::size_t>& which) {
    if (which.empty()) return;
    out.rejected_cues[reason] += which.size();
    out.events.push_back(rejected_event(video.video_id, reason, which));
  };
  auto defer = [&](const std::vector<std::size_t>& which, const std::string& why) {
    out.deferred = true;
    out.deferred_cues += which.size();
    out.events.push_back({{"event", "deferred"},
                          {"video_id", video.video_id},
                          {"cue_count", which.size()},
                          {"error", why}});
  };

  // Per-cue filters.
  const auto overlapping = overlapping_positions(CaptionTrack{CaptionFormat::srt, cues, {}});
  std::map<RejectReason, std::vector<std::size_t>> by_reason;
  std::vector<PassingCue> passing;
  for (const auto& cue : cues) {
    auto verdict = filter_cue(cue, overlapping, cfg.filter);
    if (verdict.passed()) {
      passing.push_back({cue, std::move(verdict.transcript)});
    } else {
      by_reason[*verdict.reason].push_back(cue.index);
    }
  }
  for (const auto& [reason, which] : by_reason) reject(reason, which);

  std::vector<std::size_t> passing_indices;
  for (const auto& pc : passing) passing_indices.push_back(pc.cue.index);
  if (passing.empty()) {
    out.events.push_back({{"event", "video_done"}, {"video_id", video.video_id}});
    return out;
  }

  try {
    video.audio_ref = clients.media->fetch(video.video_id);
  } catch (const ClientError& e) {
    if (e.retryable()) {
      defer(passing_indices, e.what());
      return out;
    }
    reject(RejectReason::media_unavailable, passing_indices);
    out.events.push_back({{"event", "video_done"}, {"video_id", video.video_id}});
    return out;
  }

  // Video-level ASR similarity gate.
  try {
    auto asr = clients.asr_for(video);
    out.gate = video_gate(video, passing, *asr, cfg.filter);
  } catch (const ClientError& e) {
    if (e.retryable()) {
      defer(passing_indices, e.what());
      return out;
    }
    reject(RejectReason::similarity_gate, passing_indices);
    out.events.push_back({{"event", "video_done"}, {"video_id", video.video_id}});
    return out;
  }
  {
    std::vector<std::size_t> probes;
    std::vector<double> sims;
    for (const auto& p : out.gate->probes) {
      probes.push_back(p.cue_position);
      sims.push_back(p.similarity);
    }
    out.events.push_back({{"event", "gate"},
                          {"video_id", video.video_id},
                          {"passed", out.gate->passed},
                          {"score", out.gate->score},
                          {"probe_cues", probes},
                          {"probe_similarities", sims}});
  }
  if (!out.gate->passed) {
    reject(RejectReason::similarity_gate, passing_indices);
    out.events.push_back({{"event", "video_done"}, {"video_id", video.video_id}});
    return out;
  }

  // Post-processing; utterances of one video are handled in order.
  auto merged = merge_adjacent(video.video_id, passing, cfg.merge);
  std::vector<Utterance> aligned;
  aligned.reserve(merged.size());
  for (const auto& u : merged) aligned.push_back(refine_boundaries(u, video, *clients.aligner, cfg.refine));
  for (std::size_t i = 1; i < aligned.size(); ++i) {
    if (aligned[i - 1].end > aligned[i].start) {
      aligned[i - 1].warnings.emplace_back("overlaps next utterance after widening");
      aligned[i].warnings.emplace_back("overlaps previous utterance after widening");
    }
  }

  for (std::size_t i = 0; i < aligned.size(); ++i) {
    const auto& u = aligned[i];
    const auto sample_id = sample_id_for(video.video_id, i);
    const auto rel = ManifestStore::audio_relpath(video.video_id, sample_id);
    auto cut = cut_audio(u, video, *clients.media, cfg.out_dir / rel);
    if (!cut.audio) {
      reject(RejectReason::media_unavailable, u.cue_indices);
      continue;
    }
    ManifestEntry e;
    e.sample_id = sample_id;
    e.audio_path = rel;
    e.transcript = u.transcript;
    e.start_s = to_seconds(u.start);
    e.end_s = to_seconds(u.end);
    e.duration_s = to_seconds(u.end - u.start);
    e.video_id = video.video_id;
    e.channel_id = video.channel_id;
    e.pipeline_version = std::string(kPipelineVersion);
    out.entries.push_back(std::move(e));
    out.accepted_cues += u.cue_indices.size();
    out.events.push_back({{"event", "accepted"},
                          {"video_id", video.video_id},
                          {"sample_id", sample_id},
                          {"cue_indices", u.cue_indices},
                          {"warnings", cut.utterance.warnings}});
  }
  out.events.push_back({{"event", "video_done"}, {"video_id", video.video_id}});
  return out;
}

std::size_t PipelineSummary::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : rejected_cues) n += count;
  return n;
}

nlohmann::json to_json(const PipelineSummary& s) {
  nlohmann::json rejected = nlohmann::json::object();
  for (const auto& [reason, count] : s.rejected_cues) rejected[std::string(to_string(reason))] = count;
  return {
      {"videos", s.videos},
      {"skipped_videos", s.skipped_videos},
      {"deferred_videos", s.deferred_videos},
      {"gated_out_videos", s.gated_out_videos},
      {"candidates", s.candidates},
      {"accepted_cues", s.accepted_cues},
      {"accepted_samples", s.accepted_samples},
      {"deferred_cues", s.deferred_cues},
      {"rejected", rejected},
  };
}

std::string format_summary(const PipelineSummary& s) {
  std::ostringstream os;
  os << "videos:           " << s.videos << " (skipped " << s.skipped_videos << ", deferred " << s.deferred_videos
     << ", gated out " << s.gated_out_videos << ")\n";
  os << "candidate cues:   " << s.candidates << "\n";
  os << "accepted cues:    " << s.accepted_cues << " in " << s.accepted_samples << " samples\n";
  os << "deferred cues:    " << s.deferred_cues << "\n";
  os << "rejected cues:    " << s.rejected_total() << "\n";
  for (const auto& [reason, count] : s.rejected_cues) os << "  " << to_string(reason) << ": " << count << "\n";
  return os.str();
}

PipelineSummary run_process(const PipelineConfig& cfg) { return run_process(cfg, make_clients(cfg)); }

PipelineSummary run_process(const PipelineConfig& cfg, const Clients& clients) {
  if (cfg.out_dir.empty()) throw ConfigError("no output directory given");
  auto loaded = load_videos(cfg.input);
  ManifestStore store(cfg.out_dir);

  std::set<std::string> done;
  for (const auto& ev : read_jsonl(store.provenance_path())) {
    if (ev.value("event", std::string{}) == "video_done") done.insert(ev.value("video_id", std::string{}));
  }

  PipelineSummary summary;
  std::vector<const VideoRecord*> todo;
  for (const auto& v : loaded.videos) {
    if (done.contains(v.video_id)) {
      ++summary.skipped_videos;
    } else {
      todo.push_back(&v);
    }
  }
  for (const auto& p : loaded.problems) {
    if (!done.contains(p.value("video_id", std::string{}))) store.append_provenance(p);
  }

  std::vector<VideoOutcome> outcomes(todo.size());
  std::vector<std::exception_ptr> failures(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        outcomes[i] = process_video(*todo[i], clients, cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t width = std::max<std::size_t>(1, std::min(cfg.workers, todo.size()));
    for (std::size_t w = 0; w < width; ++w) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::unique_ptr<CrawlFrontier> frontier;
  if (!cfg.frontier_path.empty() && std::filesystem::exists(cfg.frontier_path)) {
    frontier = CrawlFrontier::load(cfg.frontier_path);
  }

  // Single writer, input order.
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto& o = outcomes[i];
    for (const auto& e : o.entries) store.append(e);
    for (const auto& ev : o.events) store.append_provenance(ev);
    ++summary.videos;
    summary.candidates += o.candidates;
    summary.accepted_cues += o.accepted_cues;
    summary.accepted_samples += o.entries.size();
    summary.deferred_cues += o.deferred_cues;
    if (o.deferred) ++summary.deferred_videos;
    if (o.gate && !o.gate->passed) ++summary.gated_out_videos;
    for (const auto& [reason, count] : o.rejected_cues) summary.rejected_cues[reason] += count;
    if (frontier && !o.entries.empty()) frontier->record_acceptance(*todo[i]);
  }
  if (frontier) frontier->save(cfg.frontier_path);
  return summary;
}

}  // namespace capcorpus
