#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capcorpus/model.hpp"

namespace capcorpus {

enum class CaptionFormat { srt, webvtt };

enum class CaptionWarning {
  missing_index,      // SRT block without a numeric counter line
  non_positive_span,  // end <= start; cue dropped
  malformed_block,    // block without a parseable timing line; skipped
  out_of_order,       // source was not sorted by start time; track re-sorted
  empty_text,         // cue with no payload text
};

std::string_view to_string(CaptionWarning w);

struct TrackWarning {
  std::size_t block = 0;  // 0-based block ordinal in the source file
  CaptionWarning kind;
};

struct CaptionTrack {
  CaptionFormat format = CaptionFormat::srt;
  std::vector<CaptionCue> cues;  // sorted by start; cue.index == position
  std::vector<TrackWarning> warnings;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Parses an SRT or WebVTT file. The format is sniffed from the WEBVTT
// signature when no hint is given. Throws ParseError when the input is not
// UTF-8 or yields no cue at all.
CaptionTrack parse_track(std::string_view bytes, std::optional<CaptionFormat> format_hint = std::nullopt);

// Every unordered pair of cue positions (i < j) whose open intervals intersect
// by at least one millisecond. Touching cues do not overlap.
std::set<std::pair<std::size_t, std::size_t>> find_overlaps(const CaptionTrack& track);

std::string to_srt(const CaptionTrack& track);
std::string to_webvtt(const CaptionTrack& track);

// "HH:MM:SS,mmm" / "HH:MM:SS.mmm".
std::string format_timestamp(Millis t, char decimal_separator);

}  // namespace capcorpus
