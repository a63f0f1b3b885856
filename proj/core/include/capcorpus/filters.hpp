#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capcorpus/captions.hpp"
#include "capcorpus/clients.hpp"
#include "capcorpus/model.hpp"

namespace capcorpus {

enum class GateAggregate { mean, min };

struct FilterConfig {
  double min_duration_s = 1.0;
  double max_duration_s = 10.0;
  double similarity_threshold = 0.70;
  std::size_t probe_count = 3;
  std::uint64_t rng_seed = 0;
  GateAggregate aggregate = GateAggregate::mean;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

// Applies `key = value` pairs (field names as keys). Unknown keys are ignored
// so one file can configure several modules.
FilterConfig filter_config_from(const std::map<std::string, std::string>& values, FilterConfig base = {});

// Either the normalized transcript or the first failing reason.
struct CueVerdict {
  std::optional<RejectReason> reason;
  std::string transcript;

  bool passed() const { return !reason.has_value(); }
};

// Individual predicates on raw cue text, exposed for testing.
bool has_music_marker(std::string_view raw_text);
bool has_url(std::string_view raw_text);
bool has_non_ascii(std::string_view raw_text);

// Checks, in order: overlap, music, non_ascii, url, charset (normalized text
// empty or outside the transcript grammar), duration. `overlapping` holds the
// cue positions involved in any overlap (see overlapping_positions).
CueVerdict filter_cue(const CaptionCue& cue, const std::set<std::size_t>& overlapping, const FilterConfig& cfg);

// Convenience overload that computes overlaps for the whole track.
CueVerdict filter_cue(const CaptionCue& cue, const CaptionTrack& track, const FilterConfig& cfg);

std::set<std::size_t> overlapping_positions(const CaptionTrack& track);

// 1 - levenshtein(a, b) / max(|a|, |b|) over code points; 1 when both are empty.
double similarity(std::string_view a, std::string_view b);

struct GateProbe {
  std::size_t cue_position = 0;
  std::string caption;     // normalized
  std::string hypothesis;  // normalized ASR output
  double similarity = 0.0;
};

struct GateResult {
  bool passed = false;
  double score = 0.0;  // mean (or min) probe similarity
  std::vector<GateProbe> probes;
};

struct PassingCue {
  CaptionCue cue;
  std::string transcript;
};

// Draws up to probe_count passing cues without replacement (seeded by
// rng_seed and the video id), transcribes them and compares. Throws
// ClientError when the ASR client fails; the caller decides to defer.
GateResult video_gate(const VideoRecord& video, const std::vector<PassingCue>& passing, AsrClient& asr,
                      const FilterConfig& cfg);

// Deterministic, library-independent uniform draw in [0, n).
std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t n);

// Splitmix64 step; `state` is advanced.
std::uint64_t splitmix64(std::uint64_t& state);

std::uint64_t seed_for(std::string_view key, std::uint64_t seed);

// Positions drawn by video_gate for the given count and seed.
std::vector<std::size_t> draw_probes(std::size_t available, std::size_t count, std::uint64_t seed);

}  // namespace capcorpus
