#include "capcorpus/review_service.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "capcorpus/filters.hpp"
#include "capcorpus/serialization.hpp"

namespace capcorpus {

namespace {

HttpReply json_reply(int status, const nlohmann::json& body) {
  return {status, body.dump(), "application/json", {}};
}

HttpReply error_reply(int status, const std::string& message) {
  return json_reply(status, {{"error", message}});
}

std::optional<std::uint64_t> parse_u64(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 19) {
    return std::nullopt;
  }
  return std::stoull(text);
}

nlohmann::json estimate_json(const ReviewEstimate& est) {
  return est.pooled_wer ? nlohmann::json(*est.pooled_wer) : nlohmann::json(nullptr);
}

bool is_within(const std::filesystem::path& root, const std::filesystem::path& p) {
  auto r = root.begin();
  auto q = p.begin();
  for (; r != root.end(); ++r, ++q) {
    if (q == p.end() || *r != *q) return false;
  }
  return true;
}

void apply(const HttpReply& reply, httplib::Response& res) {
  res.status = reply.status;
  for (const auto& [k, v] : reply.headers) res.set_header(k, v);
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

ReviewService::ReviewService(ManifestStore& store, std::filesystem::path ui_dir)
    : store_(store), ui_dir_(std::move(ui_dir)) {}

HttpReply ReviewService::get_samples(std::optional<std::string> n, std::optional<std::string> seed,
                                     bool exclude_reviewed) const {
  std::size_t want = kDefaultBatch;
  if (n) {
    auto parsed = parse_u64(*n);
    if (!parsed || *parsed == 0 || *parsed > kMaxBatch) return error_reply(400, "n must be an integer in [1, 1000]");
    want = static_cast<std::size_t>(*parsed);
  }
  std::uint64_t state = 0;
  if (seed) {
    auto parsed = parse_u64(*seed);
    if (!parsed) return error_reply(400, "seed must be a non-negative integer");
    state = *parsed;
  } else {
    std::random_device rd;
    state = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  auto entries = store_.entries();
  if (exclude_reviewed) {
    std::set<std::string> reviewed;
    for (const auto& v : store_.verdicts()) reviewed.insert(v.sample_id);
    std::erase_if(entries, [&](const ManifestEntry& e) { return reviewed.contains(e.sample_id); });
  }

  auto body = nlohmann::json::array();
  for (std::size_t pick : draw_probes(entries.size(), want, state)) {
    const auto& e = entries[pick];
    body.push_back({{"sample_id", e.sample_id},
                    {"transcript", e.transcript},
                    {"audio_url", "/audio/" + e.sample_id + ".wav"},
                    {"duration_s", e.duration_s},
                    {"video_id", e.video_id}});
  }
  auto reply = json_reply(200, body);
  reply.headers["X-Manifest-Empty"] = entries.empty() ? "true" : "false";
  return reply;
}

HttpReply ReviewService::post_verdict(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) return error_reply(400, "body is not valid JSON");
  ReviewVerdict v;
  try {
    v = review_verdict_from_json(j);
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  try {
    auto est = store_.record_verdict(std::move(v));
    return json_reply(200, {{"accepted", true}, {"current_estimate", estimate_json(est)}, {"reviewed", est.reviewed}});
  } catch (const UnknownSample& e) {
    return error_reply(404, e.what());
  } catch (const InvalidVerdict& e) {
    return error_reply(400, e.what());
  }
}

HttpReply ReviewService::get_stats() const {
  const auto est = store_.review_estimate();
  return json_reply(200, {{"samples", store_.size()}, {"reviewed", est.reviewed}, {"pooled_wer", estimate_json(est)}});
}

std::optional<std::filesystem::path> ReviewService::audio_file(const std::string& sample_id) const {
  auto entry = store_.find(sample_id);
  if (!entry) return std::nullopt;
  std::error_code ec;
  const auto root = std::filesystem::weakly_canonical(store_.audio_dir(), ec);
  if (ec) return std::nullopt;
  const auto file = std::filesystem::weakly_canonical(store_.dir() / entry->audio_path, ec);
  if (ec || !is_within(root, file) || !std::filesystem::is_regular_file(file, ec)) return std::nullopt;
  return file;
}

void ReviewService::mount(httplib::Server& server) {
  server.Get("/api/samples", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> n;
    std::optional<std::string> seed;
    if (req.has_param("n")) n = req.get_param_value("n");
    if (req.has_param("seed")) seed = req.get_param_value("seed");
    const auto flag = req.get_param_value("exclude_reviewed");
    apply(get_samples(n, seed, flag == "1" || flag == "true"), res);
  });
  server.Post("/api/verdict", [this](const httplib::Request& req, httplib::Response& res) {
    apply(post_verdict(req.body), res);
  });
  server.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) { apply(get_stats(), res); });
  server.Get(R"(/audio/([^/]+)\.wav)", [this](const httplib::Request& req, httplib::Response& res) {
    auto file = audio_file(req.matches[1]);
    if (!file) {
      apply(error_reply(404, "no audio for sample"), res);
      return;
    }
    std::ifstream in(*file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    // httplib answers Range requests from the full body.
    res.set_content(buf.str(), "audio/wav");
    res.set_header("Accept-Ranges", "bytes");
  });

  std::error_code ec;
  if (!ui_dir_.empty() && std::filesystem::is_directory(ui_dir_, ec)) {
    server.set_mount_point("/", ui_dir_.string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("review UI bundle not installed; the JSON API lives under /api/\n", "text/plain");
    });
  }
}

struct ReviewServer::Impl {
  ReviewService service;
  httplib::Server server;
  std::thread thread;

  Impl(ManifestStore& store, std::filesystem::path ui_dir) : service(store, std::move(ui_dir)) {
    service.mount(server);
  }
};

ReviewServer::ReviewServer(ManifestStore& store, std::filesystem::path ui_dir)
    : impl_(std::make_unique<Impl>(store, std::move(ui_dir))) {}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ReviewServer::serve(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

void ReviewServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::pair<std::string, int> parse_bind_address(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("bind address must be host:port");
  auto port = parse_u64(bind.substr(colon + 1));
  if (!port || *port > 65535) throw ConfigError("invalid port in '" + bind + "'");
  return {bind.substr(0, colon), static_cast<int>(*port)};
}

}  // namespace capcorpus
