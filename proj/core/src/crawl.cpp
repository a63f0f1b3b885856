#include "capcorpus/crawl.hpp"

#include <fstream>

#include "capcorpus/serialization.hpp"

namespace capcorpus {

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open keyword list '" + path.string() + "'");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  return words;
}

CrawlFrontier::CrawlFrontier(std::vector<std::string> keywords) : keywords_(std::move(keywords)) {}

std::string CrawlFrontier::next_keyword() {
  std::lock_guard lock(mu_);
  if (keywords_.empty()) throw ConfigError("keyword list is empty");
  auto kw = keywords_[keyword_cursor_];
  keyword_cursor_ = (keyword_cursor_ + 1) % keywords_.size();
  return kw;
}

std::size_t CrawlFrontier::enqueue_results(CandidateSource source, const std::vector<VideoRecord>& videos) {
  std::lock_guard lock(mu_);
  std::size_t added = 0;
  auto& queue = source == CandidateSource::channel ? channel_pending_ : keyword_pending_;
  for (const auto& v : videos) {
    if (v.video_id.empty() || !seen_videos_.insert(v.video_id).second) continue;
    queue.push_back({source, v});
    ++added;
  }
  return added;
}

bool CrawlFrontier::record_acceptance(const VideoRecord& video) {
  std::lock_guard lock(mu_);
  if (video.channel_id.empty()) return false;
  const bool fresh = channel_memory_.insert(video.channel_id).second;
  if (fresh) channels_to_mine_.push_back(video.channel_id);
  return fresh;
}

std::optional<std::string> CrawlFrontier::next_channel_to_mine() {
  std::lock_guard lock(mu_);
  if (channels_to_mine_.empty()) return std::nullopt;
  auto ch = channels_to_mine_.front();
  channels_to_mine_.pop_front();
  return ch;
}

std::optional<VideoRecord> CrawlFrontier::pop_next() {
  std::lock_guard lock(mu_);
  for (auto* queue : {&channel_pending_, &keyword_pending_}) {
    if (!queue->empty()) {
      auto v = std::move(queue->front().video);
      queue->pop_front();
      return v;
    }
  }
  return std::nullopt;
}

std::size_t CrawlFrontier::pending_size() const {
  std::lock_guard lock(mu_);
  return channel_pending_.size() + keyword_pending_.size();
}

bool CrawlFrontier::seen(const std::string& video_id) const {
  std::lock_guard lock(mu_);
  return seen_videos_.contains(video_id);
}

std::set<std::string> CrawlFrontier::channel_memory() const {
  std::lock_guard lock(mu_);
  return channel_memory_;
}

nlohmann::json CrawlFrontier::snapshot() const {
  std::lock_guard lock(mu_);
  auto pending = [](const std::deque<Pending>& q) {
    auto arr = nlohmann::json::array();
    for (const auto& p : q) arr.push_back(video_stub_to_json(p.video));
    return arr;
  };
  return {
      {"version", 1},
      {"keywords", keywords_},
      {"keyword_cursor", keyword_cursor_},
      {"channel_memory", channel_memory_},
      {"channels_to_mine", channels_to_mine_},
      {"seen_videos", seen_videos_},
      {"pending_channel", pending(channel_pending_)},
      {"pending_keyword", pending(keyword_pending_)},
  };
}

std::unique_ptr<CrawlFrontier> CrawlFrontier::restore(const nlohmann::json& j) {
  try {
    auto f = std::make_unique<CrawlFrontier>(j.at("keywords").get<std::vector<std::string>>());
    f->keyword_cursor_ = j.value("keyword_cursor", std::size_t{0});
    if (!f->keywords_.empty()) f->keyword_cursor_ %= f->keywords_.size();
    f->channel_memory_ = j.value("channel_memory", std::set<std::string>{});
    for (const auto& ch : j.value("channels_to_mine", std::vector<std::string>{})) f->channels_to_mine_.push_back(ch);
    f->seen_videos_ = j.value("seen_videos", std::set<std::string>{});
    for (const auto& stub : j.value("pending_channel", nlohmann::json::array())) {
      f->channel_pending_.push_back({CandidateSource::channel, video_stub_from_json(stub)});
    }
    for (const auto& stub : j.value("pending_keyword", nlohmann::json::array())) {
      f->keyword_pending_.push_back({CandidateSource::keyword, video_stub_from_json(stub)});
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad frontier snapshot: ") + e.what());
  }
}

void CrawlFrontier::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so an interrupted save never leaves a torn snapshot.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write frontier snapshot '" + tmp.string() + "'");
    out << snapshot().dump(2) << '\n';
    if (!out) throw IoError("failed writing frontier snapshot");
  }
  std::filesystem::rename(tmp, path);
}

std::unique_ptr<CrawlFrontier> CrawlFrontier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open frontier snapshot '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error("frontier snapshot is not valid JSON");
  return restore(j);
}

std::vector<VideoRecord> crawl(CrawlFrontier& frontier, SearchClient& search, const CrawlOptions& options) {
  while (auto channel = frontier.next_channel_to_mine()) {
    frontier.enqueue_results(CandidateSource::channel, search.list_channel(*channel));
  }
  for (std::size_t r = 0; r < options.rounds; ++r) {
    frontier.enqueue_results(CandidateSource::keyword, search.search(frontier.next_keyword()));
  }
  std::vector<VideoRecord> out;
  while (options.max_videos == 0 || out.size() < options.max_videos) {
    auto next = frontier.pop_next();
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

}  // namespace capcorpus
