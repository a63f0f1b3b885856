#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "capcorpus/manifest.hpp"

namespace httplib {
class Server;
}

namespace capcorpus {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
};

// JSON API for the human validation workflow:
//   GET  /api/samples?n=8&seed=&exclude_reviewed=  -> [{sample_id, transcript, audio_url, ...}]
//   POST /api/verdict                              -> {accepted, current_estimate, reviewed}
//   GET  /api/stats                                -> {samples, reviewed, pooled_wer}
//   GET  /audio/<sample_id>.wav                    -> audio/wav (Range supported)
// The UI bundle, when present, is served from /.
class ReviewService {
 public:
  static constexpr std::size_t kDefaultBatch = 8;
  static constexpr std::size_t kMaxBatch = 1000;

  explicit ReviewService(ManifestStore& store, std::filesystem::path ui_dir = {});

  // An empty manifest yields [] with header X-Manifest-Empty: true.
  HttpReply get_samples(std::optional<std::string> n, std::optional<std::string> seed,
                        bool exclude_reviewed) const;
  HttpReply post_verdict(const std::string& body);
  HttpReply get_stats() const;

  // Resolved file for a sample, or nullopt when the id is unknown or the
  // path would escape the audio directory.
  std::optional<std::filesystem::path> audio_file(const std::string& sample_id) const;

  void mount(httplib::Server& server);

 private:
  ManifestStore& store_;
  std::filesystem::path ui_dir_;
};

// Owns an httplib server running ReviewService on a background thread.
class ReviewServer {
 public:
  ReviewServer(ManifestStore& store, std::filesystem::path ui_dir = {});
  ~ReviewServer();

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Binds and starts listening; port 0 picks a free port. Throws IoError on
  // bind failure. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks serving on the calling thread.
  void serve(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" -> (host, port). Throws ConfigError.
std::pair<std::string, int> parse_bind_address(const std::string& bind);

}  // namespace capcorpus
