#include "capcorpus/manifest.hpp"

#include <fstream>
#include <sstream>

#include "capcorpus/normalizer.hpp"
#include "capcorpus/serialization.hpp"

namespace capcorpus {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path, std::size_t* complete_bytes) {
  std::vector<nlohmann::json> rows;
  if (complete_bytes) *complete_bytes = 0;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return rows;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) break;  // interrupted write
    ++line_no;
    const std::string_view line(data.data() + pos, nl - pos);
    if (!line.empty()) {
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed JSON line");
      }
      rows.push_back(std::move(j));
    }
    pos = nl + 1;
  }
  if (complete_bytes) *complete_bytes = pos;
  return rows;
}

std::pair<std::string, std::string> review_pair(const ReviewVerdict& v, const std::string& original_transcript) {
  if (v.verdict == Verdict::corrected && v.corrected_transcript) {
    return {normalize(*v.corrected_transcript), original_transcript};
  }
  return {original_transcript, original_transcript};
}

namespace {

// Drops a torn trailing line so later appends start on a fresh line.
void truncate_to(const std::filesystem::path& path, std::size_t bytes) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path) != bytes) {
    std::filesystem::resize_file(path, bytes);
  }
}

}  // namespace

ManifestStore::ManifestStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create manifest directory '" + dir_.string() + "': " + ec.message());

  std::size_t valid = 0;
  for (const auto& row : read_jsonl(manifest_path(), &valid)) {
    auto e = manifest_entry_from_json(row);
    by_id_.emplace(e.sample_id, entries_.size());
    entries_.push_back(std::move(e));
  }
  truncate_to(manifest_path(), valid);

  for (const auto& row : read_jsonl(reviews_path(), &valid)) verdicts_.push_back(review_verdict_from_json(row));
  truncate_to(reviews_path(), valid);
  read_jsonl(provenance_path(), &valid);
  truncate_to(provenance_path(), valid);

  estimate_ = estimate_from(verdicts_);
}

std::string ManifestStore::audio_relpath(const std::string& video_id, const std::string& sample_id) {
  return "audio/" + video_id + "/" + sample_id + ".wav";
}

void ManifestStore::append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open '" + path.string() + "' for append");
  out << line << '\n';
  out.flush();
  if (!out) throw IoError("failed appending to '" + path.string() + "'");
}

void ManifestStore::append(const ManifestEntry& entry) {
  validate(entry);
  std::lock_guard lock(mu_);
  if (by_id_.contains(entry.sample_id)) throw DuplicateSample(entry.sample_id);
  append_line(manifest_path(), to_json(entry).dump());
  by_id_.emplace(entry.sample_id, entries_.size());
  entries_.push_back(entry);
}

void ManifestStore::append_provenance(const nlohmann::json& event) {
  std::lock_guard lock(mu_);
  append_line(provenance_path(), event.dump());
}

std::vector<ManifestEntry> ManifestStore::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::optional<ManifestEntry> ManifestStore::find(const std::string& sample_id) const {
  std::lock_guard lock(mu_);
  auto it = by_id_.find(sample_id);
  if (it == by_id_.end()) return std::nullopt;
  return entries_[it->second];
}

std::size_t ManifestStore::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

ReviewEstimate ManifestStore::estimate_from(const std::vector<ReviewVerdict>& verdicts) const {
  ReviewEstimate est;
  for (const auto& v : verdicts) {
    auto it = by_id_.find(v.sample_id);
    if (it == by_id_.end()) continue;
    auto [ref, hyp] = review_pair(v, entries_[it->second].transcript);
    est.counts += word_counts(ref, hyp);
    ++est.reviewed;
  }
  if (est.counts.reference_length() > 0) est.pooled_wer = wer(est.counts);
  return est;
}

ReviewEstimate ManifestStore::record_verdict(ReviewVerdict v) {
  std::lock_guard lock(mu_);
  auto it = by_id_.find(v.sample_id);
  if (it == by_id_.end()) throw UnknownSample(v.sample_id);
  const auto& original = entries_[it->second].transcript;
  try {
    validate(v, original);
  } catch (const Error& e) {
    throw InvalidVerdict(e.what());
  }
  if (v.timestamp.empty()) v.timestamp = rfc3339_now();

  append_line(reviews_path(), to_json(v).dump());
  auto [ref, hyp] = review_pair(v, original);
  estimate_.counts += word_counts(ref, hyp);
  ++estimate_.reviewed;
  estimate_.pooled_wer.reset();
  if (estimate_.counts.reference_length() > 0) estimate_.pooled_wer = wer(estimate_.counts);
  verdicts_.push_back(std::move(v));
  return estimate_;
}

ReviewEstimate ManifestStore::review_estimate() const {
  std::lock_guard lock(mu_);
  return estimate_;
}

std::vector<ReviewVerdict> ManifestStore::verdicts() const {
  std::lock_guard lock(mu_);
  return verdicts_;
}

ReviewEstimate ManifestStore::recompute_review_estimate() const {
  std::vector<ReviewVerdict> from_disk;
  for (const auto& row : read_jsonl(reviews_path())) from_disk.push_back(review_verdict_from_json(row));
  std::lock_guard lock(mu_);
  return estimate_from(from_disk);
}

ManifestStats stats(const std::filesystem::path& manifest_dir) {
  ManifestStats s;
  for (const auto& row : read_jsonl(manifest_dir / "manifest.jsonl")) {
    const auto e = manifest_entry_from_json(row);
    ++s.samples;
    s.total_seconds += e.duration_s;
    ++s.per_channel[e.channel_id];
  }
  s.total_hours = s.total_seconds / 3600.0;
  for (const auto& ev : read_jsonl(manifest_dir / "provenance.jsonl")) {
    const auto kind = ev.value("event", std::string{});
    if (kind == "rejected") {
      s.reject_histogram[ev.value("reason", std::string{"unknown"})] += ev.value("cue_count", std::size_t{1});
    } else if (kind == "deferred") {
      s.deferred_cues += ev.value("cue_count", std::size_t{0});
    }
  }
  return s;
}

nlohmann::json to_json(const ManifestStats& s) {
  return {
      {"samples", s.samples},
      {"total_seconds", s.total_seconds},
      {"total_hours", s.total_hours},
      {"per_channel", s.per_channel},
      {"reject_histogram", s.reject_histogram},
      {"deferred_cues", s.deferred_cues},
  };
}

}  // namespace capcorpus
