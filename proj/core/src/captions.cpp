#include "capcorpus/captions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "capcorpus/utf8.hpp"

namespace capcorpus {

std::string_view to_string(CaptionWarning w) {
  switch (w) {
    case CaptionWarning::missing_index: return "missing_index";
    case CaptionWarning::non_positive_span: return "non_positive_span";
    case CaptionWarning::malformed_block: return "malformed_block";
    case CaptionWarning::out_of_order: return "out_of_order";
    case CaptionWarning::empty_text: return "empty_text";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<long long> to_int(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// [H+:]MM:SS(,|.)mmm
std::optional<Millis> parse_timestamp(std::string_view s) {
  const auto sep = s.find_last_of(",.");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto frac = s.substr(sep + 1);
  if (frac.size() != 3) return std::nullopt;
  auto ms = to_int(frac);
  if (!ms) return std::nullopt;

  std::vector<std::string_view> fields;
  std::string_view clock = s.substr(0, sep);
  while (true) {
    auto colon = clock.find(':');
    fields.push_back(clock.substr(0, colon));
    if (colon == std::string_view::npos) break;
    clock.remove_prefix(colon + 1);
  }
  if (fields.size() != 2 && fields.size() != 3) return std::nullopt;

  long long hours = 0;
  std::size_t k = 0;
  if (fields.size() == 3) {
    auto h = to_int(fields[0]);
    if (!h) return std::nullopt;
    hours = *h;
    k = 1;
  }
  if (fields[k].size() != 2 || fields[k + 1].size() != 2) return std::nullopt;
  auto minutes = to_int(fields[k]);
  auto seconds = to_int(fields[k + 1]);
  if (!minutes || !seconds || *minutes > 59 || *seconds > 59) return std::nullopt;
  return Millis{((hours * 60 + *minutes) * 60 + *seconds) * 1000 + *ms};
}

std::optional<std::pair<Millis, Millis>> parse_timing_line(std::string_view line) {
  const auto arrow = line.find("-->");
  if (arrow == std::string_view::npos) return std::nullopt;
  auto lhs = trim(line.substr(0, arrow));
  auto rhs = trim(line.substr(arrow + 3));
  // Anything after the end timestamp is a cue setting list.
  const auto ws = rhs.find_first_of(" \t");
  if (ws != std::string_view::npos) rhs = rhs.substr(0, ws);
  auto start = parse_timestamp(lhs);
  auto end = parse_timestamp(rhs);
  if (!start || !end) return std::nullopt;
  return std::pair{*start, *end};
}

void decode_entity(std::string_view& rest, std::string& out) {
  static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"},     {"&gt;", ">"},  {"&quot;", "\""},
      {"&apos;", "'"}, {"&#39;", "'"},   {"&nbsp;", " "}, {"&lrm;", ""}, {"&rlm;", ""},
  };
  for (auto [name, value] : kEntities) {
    if (rest.substr(0, name.size()) == name) {
      out.append(value);
      rest.remove_prefix(name.size());
      return;
    }
  }
  out.push_back('&');
  rest.remove_prefix(1);
}

// Drops markup (<c>, <v Name>, <i>, timestamp tags, {\an8}) and decodes
// the usual character references.
std::string clean_payload_line(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  std::string_view rest = line;
  while (!rest.empty()) {
    const char c = rest.front();
    if (c == '<') {
      const auto close = rest.find('>');
      if (close == std::string_view::npos) {
        out.push_back(c);
        rest.remove_prefix(1);
      } else {
        rest.remove_prefix(close + 1);
      }
    } else if (c == '{' && rest.size() > 1 && rest[1] == '\\') {
      const auto close = rest.find('}');
      if (close == std::string_view::npos) {
        out.push_back(c);
        rest.remove_prefix(1);
      } else {
        rest.remove_prefix(close + 1);
      }
    } else if (c == '&') {
      decode_entity(rest, out);
    } else {
      out.push_back(c);
      rest.remove_prefix(1);
    }
  }
  return out;
}

std::string join_payload(const std::vector<std::string_view>& lines, std::size_t first) {
  std::string text;
  for (std::size_t i = first; i < lines.size(); ++i) {
    auto cleaned = clean_payload_line(lines[i]);
    auto piece = trim(cleaned);
    if (piece.empty()) continue;
    if (!text.empty()) text.push_back(' ');
    text.append(piece);
  }
  return text;
}

std::vector<std::vector<std::string_view>> split_blocks(std::string_view text) {
  std::vector<std::vector<std::string_view>> blocks;
  std::vector<std::string_view> current;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (trim(line).empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
    pos = nl + 1;
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

struct RawCue {
  Millis start;
  Millis end;
  std::string text;
};

bool is_webvtt(std::string_view text) {
  return text.substr(0, 6) == "WEBVTT" &&
         (text.size() == 6 || text[6] == ' ' || text[6] == '\t' || text[6] == '\n');
}

}  // namespace

CaptionTrack parse_track(std::string_view bytes, std::optional<CaptionFormat> format_hint) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (!utf8::decode(bytes)) throw ParseError("caption file is not valid UTF-8");

  std::string text;
  text.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] == '\r') {
      text.push_back('\n');
      if (i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
    } else {
      text.push_back(bytes[i]);
    }
  }

  CaptionTrack track;
  track.format = format_hint.value_or(is_webvtt(text) ? CaptionFormat::webvtt : CaptionFormat::srt);
  const bool vtt = track.format == CaptionFormat::webvtt;

  auto blocks = split_blocks(text);
  std::vector<RawCue> raw;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& lines = blocks[b];
    if (vtt) {
      if (b == 0 && is_webvtt(lines[0])) continue;
      auto head = trim(lines[0]);
      if (head.starts_with("NOTE") || head.starts_with("STYLE") || head.starts_with("REGION")) {
        if (head.find("-->") == std::string_view::npos) continue;
      }
    }

    std::size_t timing_at = 0;
    if (lines[0].find("-->") == std::string_view::npos) {
      timing_at = 1;
    } else if (!vtt) {
      track.warnings.push_back({b, CaptionWarning::missing_index});
    }
    if (!vtt && timing_at == 1 && !all_digits(trim(lines[0]))) {
      track.warnings.push_back({b, CaptionWarning::missing_index});
    }
    if (timing_at >= lines.size()) {
      track.warnings.push_back({b, CaptionWarning::malformed_block});
      continue;
    }
    auto timing = parse_timing_line(lines[timing_at]);
    if (!timing) {
      track.warnings.push_back({b, CaptionWarning::malformed_block});
      continue;
    }
    if (timing->second <= timing->first) {
      track.warnings.push_back({b, CaptionWarning::non_positive_span});
      continue;
    }
    auto payload = join_payload(lines, timing_at + 1);
    if (payload.empty()) track.warnings.push_back({b, CaptionWarning::empty_text});
    raw.push_back({timing->first, timing->second, std::move(payload)});
  }

  if (raw.empty()) throw ParseError("no caption cue could be extracted");

  if (!std::is_sorted(raw.begin(), raw.end(),
                      [](const RawCue& a, const RawCue& b) { return a.start < b.start; })) {
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawCue& a, const RawCue& b) { return a.start < b.start; });
    track.warnings.push_back({0, CaptionWarning::out_of_order});
  }

  track.cues.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    track.cues.push_back({i, raw[i].start, raw[i].end, std::move(raw[i].text)});
  }
  return track;
}

std::set<std::pair<std::size_t, std::size_t>> find_overlaps(const CaptionTrack& track) {
  const auto& cues = track.cues;
  std::vector<std::size_t> order(cues.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cues[a].start < cues[b].start; });

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> active;
  for (std::size_t pos : order) {
    const auto& cue = cues[pos];
    std::erase_if(active, [&](std::size_t a) { return cues[a].end <= cue.start; });
    for (std::size_t a : active) {
      // Both spans are non-empty and a starts no later than cue, so the
      // intersection is at least 1 ms once a.end > cue.start.
      if (cue.end > cue.start) pairs.emplace(std::min(a, pos), std::max(a, pos));
    }
    if (cue.end > cue.start) active.push_back(pos);
  }
  return pairs;
}

std::string format_timestamp(Millis t, char decimal_separator) {
  const long long total = t.count();
  const long long ms = total % 1000;
  const long long s = (total / 1000) % 60;
  const long long m = (total / 60000) % 60;
  const long long h = total / 3600000;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld%c%03lld", h, m, s, decimal_separator, ms);
  return buf;
}

std::string to_srt(const CaptionTrack& track) {
  std::string out;
  for (std::size_t i = 0; i < track.cues.size(); ++i) {
    const auto& cue = track.cues[i];
    out += std::to_string(i + 1) + "\n";
    out += format_timestamp(cue.start, ',') + " --> " + format_timestamp(cue.end, ',') + "\n";
    out += cue.raw_text + "\n\n";
  }
  return out;
}

std::string to_webvtt(const CaptionTrack& track) {
  std::string out = "WEBVTT\n\n";
  for (const auto& cue : track.cues) {
    out += format_timestamp(cue.start, '.') + " --> " + format_timestamp(cue.end, '.') + "\n";
    out += cue.raw_text + "\n\n";
  }
  return out;
}

}  // namespace capcorpus
