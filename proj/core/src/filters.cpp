#include "capcorpus/filters.hpp"

#include <algorithm>
#include <numeric>

#include "capcorpus/metrics.hpp"
#include "capcorpus/normalizer.hpp"
#include "capcorpus/utf8.hpp"

namespace capcorpus {

void FilterConfig::validate() const {
  if (!(min_duration_s > 0.0 && min_duration_s < max_duration_s)) {
    throw ConfigError("require 0 < min_duration_s < max_duration_s");
  }
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
    throw ConfigError("similarity_threshold must lie in [0, 1]");
  }
  if (probe_count == 0) throw ConfigError("probe_count must be positive");
}

FilterConfig filter_config_from(const std::map<std::string, std::string>& values, FilterConfig cfg) {
  auto number = [&](const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
    }
  };
  auto integer = [&](const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(text, &used);
      if (used != text.size() || text.starts_with('-')) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a non-negative integer, got '" + text + "'");
    }
  };
  for (const auto& [key, value] : values) {
    if (key == "min_duration_s") {
      cfg.min_duration_s = number(key, value);
    } else if (key == "max_duration_s") {
      cfg.max_duration_s = number(key, value);
    } else if (key == "similarity_threshold") {
      cfg.similarity_threshold = number(key, value);
    } else if (key == "probe_count") {
      cfg.probe_count = integer(key, value);
    } else if (key == "rng_seed" || key == "seed") {
      cfg.rng_seed = integer(key, value);
    } else if (key == "gate_aggregate") {
      if (value == "mean") {
        cfg.aggregate = GateAggregate::mean;
      } else if (value == "min") {
        cfg.aggregate = GateAggregate::min;
      } else {
        throw ConfigError("gate_aggregate must be 'mean' or 'min'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool delimited_contains(std::string_view lower, char open, char close, std::string_view needle) {
  std::size_t pos = 0;
  while ((pos = lower.find(open, pos)) != std::string_view::npos) {
    const auto end = lower.find(close, pos + 1);
    if (end == std::string_view::npos) return false;
    if (lower.substr(pos + 1, end - pos - 1).find(needle) != std::string_view::npos) return true;
    pos = end + 1;
  }
  return false;
}

}  // namespace

bool has_music_marker(std::string_view raw_text) {
  if (raw_text.find("♪") != std::string_view::npos || raw_text.find("♫") != std::string_view::npos) {
    return true;
  }
  const auto lower = ascii_lower(raw_text);
  return delimited_contains(lower, '[', ']', "music") || delimited_contains(lower, '(', ')', "music") ||
         delimited_contains(lower, '*', '*', "music");
}

bool has_url(std::string_view raw_text) {
  const auto lower = ascii_lower(raw_text);
  if (lower.find("http://") != std::string::npos || lower.find("https://") != std::string::npos) return true;
  for (auto pos = lower.find("www."); pos != std::string::npos; pos = lower.find("www.", pos + 1)) {
    if (pos == 0 || !is_alnum(lower[pos - 1])) return true;
  }
  return false;
}

bool has_non_ascii(std::string_view raw_text) {
  // The typographic apostrophe is mapped to ASCII before any check runs.
  std::string mapped(raw_text);
  for (std::size_t pos = 0; (pos = mapped.find("’", pos)) != std::string::npos;) {
    mapped.replace(pos, 3, "'");
  }
  return !utf8::is_ascii(mapped);
}

std::set<std::size_t> overlapping_positions(const CaptionTrack& track) {
  std::set<std::size_t> out;
  for (auto [a, b] : find_overlaps(track)) {
    out.insert(a);
    out.insert(b);
  }
  return out;
}

CueVerdict filter_cue(const CaptionCue& cue, const std::set<std::size_t>& overlapping, const FilterConfig& cfg) {
  if (overlapping.contains(cue.index)) return {RejectReason::overlap, {}};
  if (has_music_marker(cue.raw_text)) return {RejectReason::music, {}};
  if (has_non_ascii(cue.raw_text)) return {RejectReason::non_ascii, {}};
  if (has_url(cue.raw_text)) return {RejectReason::url, {}};

  auto transcript = normalize(cue.raw_text);
  if (transcript.empty()) return {RejectReason::empty_after_normalization, {}};
  if (!matches_transcript_grammar(transcript)) return {RejectReason::charset, {}};

  const auto d = cue.duration();
  if (d < from_seconds(cfg.min_duration_s) || d > from_seconds(cfg.max_duration_s)) {
    return {RejectReason::duration, {}};
  }
  return {std::nullopt, std::move(transcript)};
}

CueVerdict filter_cue(const CaptionCue& cue, const CaptionTrack& track, const FilterConfig& cfg) {
  return filter_cue(cue, overlapping_positions(track), cfg);
}

double similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8::decode_lossy(a);
  const auto ub = utf8::decode_lossy(b);
  const auto longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  while (true) {
    const std::uint64_t r = splitmix64(state);
    if (r < limit) return r % n;
  }
}

std::uint64_t seed_for(std::string_view key, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h ^ (seed * 0x9E3779B97F4A7C15ULL);
}

std::vector<std::size_t> draw_probes(std::size_t available, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> pool(available);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  const std::size_t take = std::min(available, count);
  std::uint64_t state = seed;
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(state, available - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

GateResult video_gate(const VideoRecord& video, const std::vector<PassingCue>& passing, AsrClient& asr,
                      const FilterConfig& cfg) {
  if (passing.empty()) throw Error("video_gate needs at least one passing cue");
  GateResult result;
  for (std::size_t pick : draw_probes(passing.size(), cfg.probe_count, seed_for(video.video_id, cfg.rng_seed))) {
    const auto& pc = passing[pick];
    GateProbe probe;
    probe.cue_position = pc.cue.index;
    probe.caption = pc.transcript;
    probe.hypothesis = normalize(asr.transcribe({video.audio_ref, pc.cue.start, pc.cue.end}));
    probe.similarity = similarity(probe.caption, probe.hypothesis);
    result.probes.push_back(std::move(probe));
  }

  if (cfg.aggregate == GateAggregate::min) {
    result.score = 1.0;
    for (const auto& p : result.probes) result.score = std::min(result.score, p.similarity);
  } else {
    double sum = 0.0;
    for (const auto& p : result.probes) sum += p.similarity;
    result.score = sum / static_cast<double>(result.probes.size());
  }
  result.passed = result.score >= cfg.similarity_threshold;
  return result;
}

}  // namespace capcorpus
