#include "capcorpus/clients.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "capcorpus/metrics.hpp"
#include "capcorpus/serialization.hpp"
#include "capcorpus/wav.hpp"

namespace capcorpus {

std::string_view to_string(ClientErrorKind kind) {
  switch (kind) {
    case ClientErrorKind::unavailable: return "unavailable";
    case ClientErrorKind::quota_exceeded: return "quota_exceeded";
    case ClientErrorKind::not_found: return "not_found";
    case ClientErrorKind::io_error: return "io_error";
    case ClientErrorKind::bad_response: return "bad_response";
    case ClientErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_at == std::string::npos) return {url, "/"};
  return {url.substr(0, path_at), url.substr(path_at)};
}

std::string span_wav_bytes(const AudioSpan& span) {
  try {
    return wav::encode(wav::slice(wav::read_file(span.audio_ref), span.start, span.end));
  } catch (const IoError& e) {
    throw ClientError(ClientErrorKind::io_error, e.what());
  }
}

ClientErrorKind classify_status(int status) {
  if (status == 429) return ClientErrorKind::quota_exceeded;
  if (status == 404) return ClientErrorKind::not_found;
  if (status >= 500) return ClientErrorKind::unavailable;
  return ClientErrorKind::bad_response;
}

}  // namespace

// --- ASR -------------------------------------------------------------------

void EchoAsrClient::add(const AudioSpan& span, std::string text) {
  texts_[{span.audio_ref, span.start.count(), span.end.count()}] = std::move(text);
}

std::string EchoAsrClient::transcribe(const AudioSpan& span) {
  auto it = texts_.find({span.audio_ref, span.start.count(), span.end.count()});
  return it == texts_.end() ? fallback_ : it->second;
}

std::string FailingAsrClient::transcribe(const AudioSpan& span) {
  throw ClientError(kind_, "ASR backend failed for " + span.audio_ref);
}

HttpAsrClient::HttpAsrClient(std::string url) {
  std::tie(scheme_host_port_, path_) = split_url(url);
}

std::string HttpAsrClient::transcribe(const AudioSpan& span) {
  const auto body = span_wav_bytes(span);
  httplib::Client client(scheme_host_port_);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (const char* token = std::getenv("CAPCORPUS_ASR_TOKEN"); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto res = client.Post(path_, headers, body, "audio/wav");
  if (!res) throw ClientError(ClientErrorKind::unavailable, "ASR request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ClientError(classify_status(res->status), "ASR returned HTTP " + std::to_string(res->status));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("transcript") || !j["transcript"].is_string()) {
    throw ClientError(ClientErrorKind::bad_response, "ASR response lacks a transcript string");
  }
  return j["transcript"].get<std::string>();
}

// --- Alignment ---------------------------------------------------------------

std::vector<AlignedWord> ThresholdAlignerClient::align(const AlignRequest& request) {
  const auto tokens = split_words(request.transcript);
  if (tokens.empty()) throw ClientError(ClientErrorKind::precondition, "empty transcript");

  const long long speech_start = (request.caption_start - left_margin_).count();
  const long long speech_end = (request.caption_end + right_margin_).count();
  const long long n = static_cast<long long>(tokens.size());
  std::vector<AlignedWord> words;
  words.reserve(tokens.size());
  for (long long k = 0; k < n; ++k) {
    // Integer arithmetic keeps the mock exact at millisecond resolution.
    const long long from = speech_start + (speech_end - speech_start) * k / n;
    const long long to = speech_start + (speech_end - speech_start) * (k + 1) / n;
    AlignedWord w{tokens[static_cast<std::size_t>(k)], Millis{from}, Millis{to}, false};
    w.aligned = from >= request.span.start.count() && to <= request.span.end.count() && to > from;
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<AlignedWord> FailingAlignerClient::align(const AlignRequest& request) {
  throw ClientError(ClientErrorKind::unavailable, "aligner unavailable for " + request.span.audio_ref);
}

GentleAlignerClient::GentleAlignerClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::vector<AlignedWord> GentleAlignerClient::align(const AlignRequest& request) {
  if (split_words(request.transcript).empty()) {
    throw ClientError(ClientErrorKind::precondition, "empty transcript");
  }
  const auto audio = span_wav_bytes(request.span);
  auto [host, prefix] = split_url(base_url_);
  if (prefix == "/") prefix.clear();

  httplib::Client client(host);
  client.set_read_timeout(120, 0);
  httplib::MultipartFormDataItems items = {
      {"audio", audio, "span.wav", "audio/wav"},
      {"transcript", request.transcript, "", "text/plain"},
  };
  auto res = client.Post(prefix + "/transcriptions?async=false", items);
  if (!res) throw ClientError(ClientErrorKind::unavailable, "aligner request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ClientError(classify_status(res->status), "aligner returned HTTP " + std::to_string(res->status));
  }
  return parse_gentle_response(res->body, request.transcript, request.span.start);
}

std::vector<AlignedWord> parse_gentle_response(std::string_view body, std::string_view transcript,
                                               Millis span_start) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.contains("words") || !j["words"].is_array()) {
    throw ClientError(ClientErrorKind::bad_response, "aligner response lacks a words array");
  }
  const auto tokens = split_words(transcript);
  const auto& words = j["words"];
  if (words.size() != tokens.size()) {
    throw ClientError(ClientErrorKind::bad_response,
                      "aligner returned " + std::to_string(words.size()) + " words for " +
                          std::to_string(tokens.size()) + " tokens");
  }
  std::vector<AlignedWord> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& w = words[i];
    AlignedWord a{tokens[i], span_start, span_start, false};
    if (w.value("case", std::string{}) == "success" && w.contains("start") && w.contains("end")) {
      a.start = span_start + from_seconds(w["start"].get<double>());
      a.end = span_start + from_seconds(w["end"].get<double>());
      a.aligned = a.end > a.start;
    }
    out.push_back(std::move(a));
  }
  return out;
}

// --- Media -------------------------------------------------------------------

std::string FixtureMediaClient::fetch(const std::string& video_id) {
  if (video_id.empty() || video_id.find('/') != std::string::npos || video_id.find("..") != std::string::npos) {
    throw ClientError(ClientErrorKind::not_found, "invalid video id '" + video_id + "'");
  }
  auto path = dir_ / (video_id + ".wav");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ClientError(ClientErrorKind::not_found, "no audio for video '" + video_id + "'");
  }
  return path.string();
}

std::filesystem::path FixtureMediaClient::cut(const std::string& audio_ref, Millis start, Millis end,
                                              const std::filesystem::path& out_path) {
  if (end <= start) throw ClientError(ClientErrorKind::precondition, "empty span");
  try {
    auto audio = wav::read_file(audio_ref);
    if (audio.channels != 1 || audio.sample_rate != wav::kSampleRate) {
      throw ClientError(ClientErrorKind::io_error, audio_ref + " is not mono 16 kHz");
    }
    wav::write_file(out_path, wav::slice(audio, start, end));
  } catch (const IoError& e) {
    throw ClientError(ClientErrorKind::io_error, e.what());
  }
  return out_path;
}

// --- Search ------------------------------------------------------------------

FixtureSearchClient FixtureSearchClient::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open search fixture '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("search fixture is not a JSON object");
  const auto base = path.parent_path();

  FixtureSearchClient client;
  auto read_map = [&](const char* key, std::map<std::string, std::vector<VideoRecord>>& into) {
    if (!j.contains(key)) return;
    for (const auto& [name, list] : j[key].items()) {
      auto& videos = into[name];
      for (const auto& stub : list) videos.push_back(video_stub_from_json(stub, base));
    }
  };
  read_map("keywords", client.by_keyword);
  read_map("channels", client.by_channel);
  return client;
}

std::vector<VideoRecord> FixtureSearchClient::search(const std::string& keyword) {
  auto it = by_keyword.find(keyword);
  if (it == by_keyword.end()) return {};
  auto videos = it->second;
  if (videos.size() > kMaxResults) videos.resize(kMaxResults);
  return videos;
}

std::vector<VideoRecord> FixtureSearchClient::list_channel(const std::string& channel_id) {
  auto it = by_channel.find(channel_id);
  return it == by_channel.end() ? std::vector<VideoRecord>{} : it->second;
}

}  // namespace capcorpus
