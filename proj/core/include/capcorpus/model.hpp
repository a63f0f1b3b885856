#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace capcorpus {

using Millis = std::chrono::milliseconds;

inline double to_seconds(Millis t) { return static_cast<double>(t.count()) / 1000.0; }

// Rounds to the nearest millisecond.
Millis from_seconds(double seconds);

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// One timed subtitle entry.
struct CaptionCue {
  std::size_t index = 0;  // ordinal within the track
  Millis start{0};
  Millis end{0};
  std::string raw_text;

  Millis duration() const { return end - start; }
  bool operator==(const CaptionCue&) const = default;
};

struct VideoRecord {
  std::string video_id;
  std::string channel_id;
  std::string title;
  Millis duration{0};
  std::vector<CaptionCue> caption_track;
  std::string audio_ref;
  // Where the caption file lives before it is parsed (search stubs).
  std::string caption_ref;
};

enum class RejectReason {
  overlap,
  music,
  non_ascii,
  url,
  charset,
  duration,
  similarity_gate,
  empty_after_normalization,
  alignment_unavailable,
  media_unavailable,
};

std::string_view to_string(RejectReason reason);
std::optional<RejectReason> parse_reject_reason(std::string_view name);
inline constexpr RejectReason kAllRejectReasons[] = {
    RejectReason::overlap,         RejectReason::music,
    RejectReason::non_ascii,       RejectReason::url,
    RejectReason::charset,         RejectReason::duration,
    RejectReason::similarity_gate, RejectReason::empty_after_normalization,
    RejectReason::alignment_unavailable, RejectReason::media_unavailable,
};

enum class Status { candidate, rejected, merged, aligned, accepted };

std::string_view to_string(Status status);

// Lifecycle events. Rejection is terminal; accepted is only reachable through
// candidate -> merged -> aligned -> accepted.
namespace event {
struct Reject {
  RejectReason reason;
};
struct Merge {};
struct AlignOk {};
// The aligner failed; the utterance keeps its boundaries and moves on.
struct AlignUnavailable {};
struct Accept {};
}  // namespace event

using LifecycleEvent =
    std::variant<event::Reject, event::Merge, event::AlignOk, event::AlignUnavailable, event::Accept>;

std::string describe(const LifecycleEvent& e);

class IllegalTransition : public Error {
 public:
  IllegalTransition(Status from, const LifecycleEvent& e);

  Status from() const { return from_; }

 private:
  Status from_;
};

struct Utterance {
  std::string source_video;
  Millis start{0};
  Millis end{0};
  std::string transcript;
  std::vector<std::size_t> cue_indices;
  Status status = Status::candidate;
  std::optional<RejectReason> reject_reason;
  // Non-fatal notes collected along the way (alignment_unavailable, widened
  // boundaries, overlap with a neighbour after widening).
  std::vector<std::string> warnings;

  Millis duration() const { return end - start; }
};

// Returns a copy of `u` moved along the lifecycle. Throws IllegalTransition.
Utterance advance_status(const Utterance& u, const LifecycleEvent& e);

struct ManifestEntry {
  std::string sample_id;
  std::string audio_path;
  std::string transcript;
  double duration_s = 0.0;
  std::string video_id;
  std::string channel_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string pipeline_version;

  bool operator==(const ManifestEntry&) const = default;
};

// Throws Error when duration_s disagrees with end_s - start_s by more than
// 1 ms or the transcript is empty.
void validate(const ManifestEntry& entry);

enum class Verdict { confirmed, corrected };

struct ReviewVerdict {
  std::string sample_id;
  Verdict verdict = Verdict::confirmed;
  std::optional<std::string> corrected_transcript;
  std::string reviewer_id;
  std::string timestamp;  // RFC 3339
};

// Checks the corrected => present-and-different invariant against the
// transcript under review.
void validate(const ReviewVerdict& v, std::string_view original_transcript);

inline constexpr std::string_view kPipelineVersion = "capcorpus-0.1.0";

}  // namespace capcorpus
