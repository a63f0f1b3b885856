#include "capcorpus/serialization.hpp"

#include <chrono>
#include <ctime>

namespace capcorpus {

namespace {

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || p.find("://") != std::string::npos) return p;
  return (base / path).lexically_normal().string();
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

VideoRecord video_stub_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    VideoRecord v;
    v.video_id = require(j, "video_id").get<std::string>();
    if (v.video_id.empty()) throw Error("empty video_id");
    v.channel_id = j.value("channel_id", std::string{});
    v.title = j.value("title", std::string{});
    v.duration = from_seconds(require(j, "duration_s").get<double>());
    v.caption_ref = resolve(j.value("captions", std::string{}), base_dir);
    v.audio_ref = resolve(j.value("audio", std::string{}), base_dir);
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad video record: ") + e.what());
  }
}

nlohmann::json video_stub_to_json(const VideoRecord& v) {
  return {
      {"video_id", v.video_id},   {"channel_id", v.channel_id},   {"title", v.title},
      {"duration_s", to_seconds(v.duration)}, {"captions", v.caption_ref}, {"audio", v.audio_ref},
  };
}

nlohmann::ordered_json to_json(const ManifestEntry& e) {
  nlohmann::ordered_json j;
  j["sample_id"] = e.sample_id;
  j["audio_path"] = e.audio_path;
  j["transcript"] = e.transcript;
  j["duration_s"] = e.duration_s;
  j["video_id"] = e.video_id;
  j["channel_id"] = e.channel_id;
  j["start_s"] = e.start_s;
  j["end_s"] = e.end_s;
  j["pipeline_version"] = e.pipeline_version;
  return j;
}

ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
  try {
    ManifestEntry e;
    e.sample_id = require(j, "sample_id").get<std::string>();
    e.audio_path = require(j, "audio_path").get<std::string>();
    e.transcript = require(j, "transcript").get<std::string>();
    e.duration_s = require(j, "duration_s").get<double>();
    e.video_id = require(j, "video_id").get<std::string>();
    e.channel_id = require(j, "channel_id").get<std::string>();
    e.start_s = require(j, "start_s").get<double>();
    e.end_s = require(j, "end_s").get<double>();
    e.pipeline_version = require(j, "pipeline_version").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("bad manifest entry: ") + ex.what());
  }
}

nlohmann::ordered_json to_json(const ReviewVerdict& v) {
  nlohmann::ordered_json j;
  j["sample_id"] = v.sample_id;
  j["verdict"] = v.verdict == Verdict::confirmed ? "confirmed" : "corrected";
  j["corrected_transcript"] = v.corrected_transcript ? nlohmann::ordered_json(*v.corrected_transcript) : nlohmann::ordered_json(nullptr);
  j["reviewer_id"] = v.reviewer_id;
  j["timestamp"] = v.timestamp;
  return j;
}

ReviewVerdict review_verdict_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("verdict must be a JSON object");
  try {
    ReviewVerdict v;
    v.sample_id = require(j, "sample_id").get<std::string>();
    const auto verdict = require(j, "verdict").get<std::string>();
    if (verdict == "confirmed") {
      v.verdict = Verdict::confirmed;
    } else if (verdict == "corrected") {
      v.verdict = Verdict::corrected;
    } else {
      throw Error("unknown verdict '" + verdict + "'");
    }
    if (auto it = j.find("corrected_transcript"); it != j.end() && !it->is_null()) {
      v.corrected_transcript = it->get<std::string>();
    }
    v.reviewer_id = j.value("reviewer_id", std::string{});
    v.timestamp = j.value("timestamp", std::string{});
    return v;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("bad verdict: ") + ex.what());
  }
}

std::string rfc3339_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace capcorpus
