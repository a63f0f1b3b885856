#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "capcorpus/metrics.hpp"
#include "capcorpus/model.hpp"

namespace capcorpus {

class DuplicateSample : public Error {
 public:
  explicit DuplicateSample(const std::string& id) : Error("duplicate sample_id '" + id + "'") {}
};

class UnknownSample : public Error {
 public:
  explicit UnknownSample(const std::string& id) : Error("unknown sample_id '" + id + "'") {}
};

class InvalidVerdict : public Error {
 public:
  using Error::Error;
};

// Reads a JSONL file. A trailing line without its newline is an interrupted
// write and is skipped; `complete_bytes` receives the length of the valid
// prefix. Throws IoError on a malformed complete line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path, std::size_t* complete_bytes = nullptr);

struct ReviewEstimate {
  std::size_t reviewed = 0;
  EditCounts counts;
  std::optional<double> pooled_wer;  // empty until a non-empty reference exists
};

// Pair fed to the pooled estimate: (reference, hypothesis). A correction is
// normalized and used as reference; the crawled transcript is the hypothesis.
std::pair<std::string, std::string> review_pair(const ReviewVerdict& v, const std::string& original_transcript);

// Directory layout:
//   manifest.jsonl     accepted samples
//   provenance.jsonl   pipeline events (rejections, deferrals, warnings)
//   reviews.jsonl      human verdicts
//   audio/<video_id>/<sample_id>.wav
// One writer per directory; all methods lock.
class ManifestStore {
 public:
  explicit ManifestStore(std::filesystem::path dir);

  ManifestStore(const ManifestStore&) = delete;
  ManifestStore& operator=(const ManifestStore&) = delete;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path manifest_path() const { return dir_ / "manifest.jsonl"; }
  std::filesystem::path provenance_path() const { return dir_ / "provenance.jsonl"; }
  std::filesystem::path reviews_path() const { return dir_ / "reviews.jsonl"; }
  std::filesystem::path audio_dir() const { return dir_ / "audio"; }

  static std::string audio_relpath(const std::string& video_id, const std::string& sample_id);

  // Throws DuplicateSample, Error (entry invariants) or IoError.
  void append(const ManifestEntry& entry);
  void append_provenance(const nlohmann::json& event);

  std::vector<ManifestEntry> entries() const;
  std::optional<ManifestEntry> find(const std::string& sample_id) const;
  std::size_t size() const;

  // Throws UnknownSample or InvalidVerdict. Fills in a missing timestamp.
  ReviewEstimate record_verdict(ReviewVerdict v);
  ReviewEstimate review_estimate() const;
  std::vector<ReviewVerdict> verdicts() const;

  // Rebuilds the estimate from reviews.jsonl on disk.
  ReviewEstimate recompute_review_estimate() const;

 private:
  void append_line(const std::filesystem::path& path, const std::string& line);
  ReviewEstimate estimate_from(const std::vector<ReviewVerdict>& verdicts) const;

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<ReviewVerdict> verdicts_;
  ReviewEstimate estimate_;
};

struct ManifestStats {
  std::size_t samples = 0;
  double total_seconds = 0.0;
  double total_hours = 0.0;
  std::map<std::string, std::size_t> per_channel;
  std::map<std::string, std::size_t> reject_histogram;  // counted in cues
  std::size_t deferred_cues = 0;
};

ManifestStats stats(const std::filesystem::path& manifest_dir);
nlohmann::json to_json(const ManifestStats& s);

}  // namespace capcorpus
