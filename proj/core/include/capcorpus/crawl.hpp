#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capcorpus/clients.hpp"
#include "capcorpus/model.hpp"

namespace capcorpus {

enum class CandidateSource { channel, keyword };

// Reads one keyword per line; blank lines and '#' comments are skipped.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

// Video candidate scheduler. Channel-sourced candidates are always handed out
// before keyword-sourced ones; within a source the order is FIFO. Every
// method locks, so workers may share one frontier.
class CrawlFrontier {
 public:
  explicit CrawlFrontier(std::vector<std::string> keywords = {});

  CrawlFrontier(const CrawlFrontier&) = delete;
  CrawlFrontier& operator=(const CrawlFrontier&) = delete;

  // Round-robin over the keyword list. Throws ConfigError when it is empty.
  std::string next_keyword();

  // Adds unseen videos to the pending queue and returns how many were added.
  std::size_t enqueue_results(CandidateSource source, const std::vector<VideoRecord>& videos);

  // Remembers the video's channel; true iff the channel was new. New channels
  // are queued for mining.
  bool record_acceptance(const VideoRecord& video);

  std::optional<std::string> next_channel_to_mine();
  std::optional<VideoRecord> pop_next();

  std::size_t pending_size() const;
  bool seen(const std::string& video_id) const;
  std::set<std::string> channel_memory() const;

  nlohmann::json snapshot() const;
  static std::unique_ptr<CrawlFrontier> restore(const nlohmann::json& snapshot);

  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<CrawlFrontier> load(const std::filesystem::path& path);

 private:
  struct Pending {
    CandidateSource source;
    VideoRecord video;
  };

  mutable std::mutex mu_;
  std::vector<std::string> keywords_;
  std::size_t keyword_cursor_ = 0;
  std::set<std::string> channel_memory_;
  std::deque<std::string> channels_to_mine_;
  std::set<std::string> seen_videos_;
  std::deque<Pending> channel_pending_;
  std::deque<Pending> keyword_pending_;
};

struct CrawlOptions {
  std::size_t rounds = 1;       // keyword searches to run
  std::size_t max_videos = 0;   // 0 = drain everything pending
};

// One crawl session: mines remembered channels first, then runs `rounds`
// keyword searches, and finally pops candidates off the frontier.
std::vector<VideoRecord> crawl(CrawlFrontier& frontier, SearchClient& search, const CrawlOptions& options);

}  // namespace capcorpus
