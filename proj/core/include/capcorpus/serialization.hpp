#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "capcorpus/model.hpp"

namespace capcorpus {

// Video stub: {"video_id", "channel_id", "title", "duration_s", "captions",
// "audio"}. Relative caption/audio paths are resolved against `base_dir`
// when it is non-empty.
VideoRecord video_stub_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json video_stub_to_json(const VideoRecord& v);

// Keys are emitted in file-format order.
nlohmann::ordered_json to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const ReviewVerdict& v);
ReviewVerdict review_verdict_from_json(const nlohmann::json& j);

// Current UTC time as RFC 3339 ("2026-10-16T08:30:00Z").
std::string rfc3339_now();

}  // namespace capcorpus
