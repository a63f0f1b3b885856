#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capcorpus/clients.hpp"
#include "capcorpus/filters.hpp"
#include "capcorpus/model.hpp"

namespace capcorpus {

struct MergeOptions {
  Millis max_gap{1000};   // next cue joins while its gap is strictly below this
  Millis max_span{10000}; // and the grown span stays at or below this
};

// Greedy left-to-right grouping of passing cues (sorted by start). Output
// utterances are in status `merged`.
std::vector<Utterance> merge_adjacent(const std::string& video_id, std::span<const PassingCue> cues,
                                      const MergeOptions& options = {});

struct RefineOptions {
  Millis step{100};
  Millis max_extension{500};
};

// Forced-alignment border repair. Each border whose word is unaligned is
// widened outward in `step` increments up to `max_extension` (clamped to
// [0, video duration]); the first widening that aligns the border word wins,
// otherwise the border stays put. An aligner failure yields an aligned
// utterance with its original boundaries and an alignment_unavailable warning.
Utterance refine_boundaries(const Utterance& u, const VideoRecord& video, AlignerClient& aligner,
                            const RefineOptions& options = {});

struct CutResult {
  Utterance utterance;  // accepted, or rejected(media_unavailable)
  std::optional<std::filesystem::path> audio;
  std::string error;
};

// Writes [start, end) of the video's audio as 16 kHz mono PCM16 to
// `out_path`. Requires an aligned utterance with a non-empty span.
CutResult cut_audio(const Utterance& u, const VideoRecord& video, MediaClient& media,
                    const std::filesystem::path& out_path);

}  // namespace capcorpus
