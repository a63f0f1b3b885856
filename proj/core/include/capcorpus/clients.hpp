#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "capcorpus/model.hpp"

namespace capcorpus {

enum class ClientErrorKind {
  unavailable,     // retryable
  quota_exceeded,  // retryable
  not_found,
  io_error,
  bad_response,
  precondition,
};

std::string_view to_string(ClientErrorKind kind);

// Retryable errors defer the work item; everything else drops it.
constexpr bool is_retryable(ClientErrorKind kind) {
  return kind == ClientErrorKind::unavailable || kind == ClientErrorKind::quota_exceeded;
}

class ClientError : public Error {
 public:
  ClientError(ClientErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ClientErrorKind kind() const { return kind_; }
  bool retryable() const { return is_retryable(kind_); }

 private:
  ClientErrorKind kind_;
};

struct AudioSpan {
  std::string audio_ref;  // full-length WAV produced by MediaClient::fetch
  Millis start{0};
  Millis end{0};
};

// ---------------------------------------------------------------------------
// Speech recognition

class AsrClient {
 public:
  virtual ~AsrClient() = default;
  // Best hypothesis for the span; may be empty.
  virtual std::string transcribe(const AudioSpan& span) = 0;
};

// Returns the caption it was configured with for a span, or a fallback text.
class EchoAsrClient final : public AsrClient {
 public:
  explicit EchoAsrClient(std::string fallback = {}) : fallback_(std::move(fallback)) {}

  void add(const AudioSpan& span, std::string text);
  std::string transcribe(const AudioSpan& span) override;

 private:
  using Key = std::tuple<std::string, long long, long long>;
  std::map<Key, std::string> texts_;
  std::string fallback_;
};

class GarbageAsrClient final : public AsrClient {
 public:
  explicit GarbageAsrClient(std::string text = "xxxx xxxx xxxx") : text_(std::move(text)) {}
  std::string transcribe(const AudioSpan&) override { return text_; }

 private:
  std::string text_;
};

class FailingAsrClient final : public AsrClient {
 public:
  explicit FailingAsrClient(ClientErrorKind kind = ClientErrorKind::unavailable) : kind_(kind) {}
  std::string transcribe(const AudioSpan&) override;

 private:
  ClientErrorKind kind_;
};

// POSTs the span as audio/wav to `url`, expects {"transcript": "..."}.
// A bearer token is read from CAPCORPUS_ASR_TOKEN when set.
class HttpAsrClient final : public AsrClient {
 public:
  explicit HttpAsrClient(std::string url);
  std::string transcribe(const AudioSpan& span) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Forced alignment

struct AlignedWord {
  std::string word;
  Millis start{0};
  Millis end{0};
  bool aligned = false;
};

struct AlignRequest {
  AudioSpan span;
  std::string transcript;
  // Caption boundaries before any widening. Real aligners ignore them; the
  // threshold mock places its simulated speech relative to them.
  Millis caption_start{0};
  Millis caption_end{0};
};

class AlignerClient {
 public:
  virtual ~AlignerClient() = default;
  // One entry per whitespace-separated transcript token, in order.
  virtual std::vector<AlignedWord> align(const AlignRequest& request) = 0;
};

// Simulates speech running from caption_start - left_margin to
// caption_end + right_margin with words spread uniformly over it. A word is
// aligned iff its whole extent lies inside the requested span.
class ThresholdAlignerClient final : public AlignerClient {
 public:
  ThresholdAlignerClient(Millis left_margin, Millis right_margin)
      : left_margin_(left_margin), right_margin_(right_margin) {}

  std::vector<AlignedWord> align(const AlignRequest& request) override;

 private:
  Millis left_margin_;
  Millis right_margin_;
};

class FailingAlignerClient final : public AlignerClient {
 public:
  std::vector<AlignedWord> align(const AlignRequest&) override;
};

// Gentle-style HTTP aligner: multipart POST of `audio` and `transcript` to
// /transcriptions?async=false, JSON word list back.
class GentleAlignerClient final : public AlignerClient {
 public:
  explicit GentleAlignerClient(std::string base_url);
  std::vector<AlignedWord> align(const AlignRequest& request) override;

 private:
  std::string base_url_;
};

// Maps a Gentle response body onto the transcript tokens. Offsets in the
// response are relative to `span_start`.
std::vector<AlignedWord> parse_gentle_response(std::string_view body, std::string_view transcript,
                                               Millis span_start);

// ---------------------------------------------------------------------------
// Media

class MediaClient {
 public:
  virtual ~MediaClient() = default;
  // Materializes the full-length mono 16 kHz WAV for a video.
  virtual std::string fetch(const std::string& video_id) = 0;
  // Writes [start, end) of `audio_ref` to `out_path` and returns it.
  virtual std::filesystem::path cut(const std::string& audio_ref, Millis start, Millis end,
                                    const std::filesystem::path& out_path) = 0;
};

// Serves <dir>/<video_id>.wav.
class FixtureMediaClient final : public MediaClient {
 public:
  explicit FixtureMediaClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::string fetch(const std::string& video_id) override;
  std::filesystem::path cut(const std::string& audio_ref, Millis start, Millis end,
                            const std::filesystem::path& out_path) override;

 private:
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Video search

class SearchClient {
 public:
  static constexpr std::size_t kMaxResults = 600;

  virtual ~SearchClient() = default;
  // At most kMaxResults most recent videos whose title matches `keyword`.
  virtual std::vector<VideoRecord> search(const std::string& keyword) = 0;
  virtual std::vector<VideoRecord> list_channel(const std::string& channel_id) = 0;
};

// Offline backend loaded from a JSON file:
//   {"keywords": {"the": [stub, ...]}, "channels": {"ch1": [stub, ...]}}
// where a stub is {"video_id", "channel_id", "title", "duration_s",
// "captions", "audio"}; relative paths resolve against the file's directory.
class FixtureSearchClient final : public SearchClient {
 public:
  static FixtureSearchClient load(const std::filesystem::path& path);

  std::vector<VideoRecord> search(const std::string& keyword) override;
  std::vector<VideoRecord> list_channel(const std::string& channel_id) override;

  std::map<std::string, std::vector<VideoRecord>> by_keyword;
  std::map<std::string, std::vector<VideoRecord>> by_channel;
};

}  // namespace capcorpus
