#include "capcorpus/segmenter.hpp"

#include <algorithm>

namespace capcorpus {

std::vector<Utterance> merge_adjacent(const std::string& video_id, std::span<const PassingCue> cues,
                                      const MergeOptions& options) {
  std::vector<Utterance> out;
  std::optional<Utterance> group;
  auto flush = [&] {
    if (group) out.push_back(advance_status(*group, event::Merge{}));
    group.reset();
  };

  for (const auto& pc : cues) {
    if (group && pc.cue.start - group->end < options.max_gap &&
        pc.cue.end - group->start <= options.max_span) {
      group->end = std::max(group->end, pc.cue.end);
      group->transcript += ' ';
      group->transcript += pc.transcript;
      group->cue_indices.push_back(pc.cue.index);
      continue;
    }
    flush();
    Utterance u;
    u.source_video = video_id;
    u.start = pc.cue.start;
    u.end = pc.cue.end;
    u.transcript = pc.transcript;
    u.cue_indices = {pc.cue.index};
    group = std::move(u);
  }
  flush();
  return out;
}

namespace {

enum class Border { first, last };

bool border_aligned(const std::vector<AlignedWord>& words, Border border) {
  if (words.empty()) return false;
  return border == Border::first ? words.front().aligned : words.back().aligned;
}

}  // namespace

Utterance refine_boundaries(const Utterance& u, const VideoRecord& video, AlignerClient& aligner,
                            const RefineOptions& options) {
  if (u.status != Status::merged) throw IllegalTransition(u.status, event::AlignOk{});

  AlignRequest request{{video.audio_ref, u.start, u.end}, u.transcript, u.start, u.end};
  std::vector<AlignedWord> words;
  try {
    words = aligner.align(request);
  } catch (const ClientError&) {
    return advance_status(u, event::AlignUnavailable{});
  }

  Utterance out = advance_status(u, event::AlignOk{});
  const Millis floor{0};
  const Millis ceiling = video.duration > Millis{0} ? video.duration : u.end + options.max_extension;

  // Borders are probed independently: the opposite border stays at its
  // caption position while one side is widened.
  auto widen = [&](Border border) -> std::optional<Millis> {
    Millis previous = border == Border::first ? u.start : u.end;
    for (Millis ext = options.step; ext <= options.max_extension; ext += options.step) {
      const Millis candidate = border == Border::first ? std::max(floor, u.start - ext)
                                                       : std::min(ceiling, u.end + ext);
      if (candidate == previous) break;  // clamped, nothing left to try
      previous = candidate;
      AlignRequest probe = request;
      (border == Border::first ? probe.span.start : probe.span.end) = candidate;
      try {
        if (border_aligned(aligner.align(probe), border)) return candidate;
      } catch (const ClientError&) {
        out.warnings.emplace_back("aligner failed while widening");
        return std::nullopt;
      }
    }
    return std::nullopt;
  };

  if (!border_aligned(words, Border::first)) {
    if (auto s = widen(Border::first)) {
      out.start = *s;
      out.warnings.emplace_back("start widened");
    }
  }
  if (!border_aligned(words, Border::last)) {
    if (auto e = widen(Border::last)) {
      out.end = *e;
      out.warnings.emplace_back("end widened");
    }
  }
  return out;
}

CutResult cut_audio(const Utterance& u, const VideoRecord& video, MediaClient& media,
                    const std::filesystem::path& out_path) {
  if (u.status != Status::aligned) throw IllegalTransition(u.status, event::Accept{});
  if (u.end <= u.start) throw Error("cut_audio: empty span for " + u.source_video);
  try {
    auto path = media.cut(video.audio_ref, u.start, u.end, out_path);
    return {advance_status(u, event::Accept{}), std::move(path), {}};
  } catch (const ClientError& e) {
    return {advance_status(u, event::Reject{RejectReason::media_unavailable}), std::nullopt, e.what()};
  }
}

}  // namespace capcorpus
