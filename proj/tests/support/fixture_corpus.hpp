#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "capcorpus/captions.hpp"
#include "capcorpus/model.hpp"

namespace capcorpus::testing {

// Writes the five-video fixture corpus:
//   <dir>/<id>.json        video stub
//   <dir>/<id>.srt|.vtt    captions
//   <dir>/media/<id>.wav   16 kHz mono tone, full video length
// Returns the video ids in input order.
std::vector<std::string> write_fixture_corpus(const std::filesystem::path& dir);

// Raw caption texts of every cue in the corpus, per video, for oracle use.
struct FixtureVideo {
  std::string id;
  std::string channel;
  double duration_s;
  bool webvtt;
  std::string captions;  // file contents
};
const std::vector<FixtureVideo>& fixture_videos();

// Labeled cue of the filter battery. Overlap cases sit next to their partner
// in the same track.
struct LabeledCue {
  double start_s;
  double end_s;
  std::string text;
  std::optional<RejectReason> expected;  // nullopt = pass
};
const std::vector<LabeledCue>& filter_battery();

// The battery as one caption track, cue i == battery entry i.
CaptionTrack battery_track();

// Fresh temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "capcorpus");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

}  // namespace capcorpus::testing
