// capcorpus: build a speech corpus from captioned videos.
//
//   capcorpus crawl   --config crawl.conf --out work/
//   capcorpus process <input> --config run.conf --out dataset/ --seed 42
//   capcorpus stats   dataset/
//   capcorpus review-serve dataset/ --bind 127.0.0.1:8080

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "capcorpus/config.hpp"
#include "capcorpus/crawl.hpp"
#include "capcorpus/manifest.hpp"
#include "capcorpus/pipeline.hpp"
#include "capcorpus/review_service.hpp"
#include "capcorpus/serialization.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string seed;
  std::string workers;
};

capcorpus::ConfigValues resolve_values(const CommonFlags& flags) {
  capcorpus::ConfigValues values;
  if (!flags.config.empty()) values = capcorpus::load_config(flags.config);
  capcorpus::apply_env_overrides(values, capcorpus::pipeline_config_keys());
  if (!flags.out.empty()) values["out"] = flags.out;
  if (!flags.seed.empty()) values["seed"] = flags.seed;
  if (!flags.workers.empty()) values["workers"] = flags.workers;
  return values;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "key = value config file");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "random seed for probe selection");
  cmd->add_option("--workers", flags.workers, "parallel video workers (default 4)");
}

int run_crawl(const CommonFlags& flags) {
  auto values = resolve_values(flags);
  auto cfg = capcorpus::pipeline_config_from(values);
  if (cfg.out_dir.empty()) throw capcorpus::ConfigError("crawl needs --out");
  if (cfg.search_fixture.empty()) throw capcorpus::ConfigError("crawl needs search_fixture in the config");
  std::filesystem::create_directories(cfg.out_dir);
  const auto frontier_path = cfg.frontier_path.empty() ? cfg.out_dir / "frontier.json" : cfg.frontier_path;

  std::unique_ptr<capcorpus::CrawlFrontier> frontier;
  if (std::filesystem::exists(frontier_path)) {
    frontier = capcorpus::CrawlFrontier::load(frontier_path);
  } else {
    if (cfg.keywords_path.empty()) throw capcorpus::ConfigError("crawl needs keywords in the config");
    frontier = std::make_unique<capcorpus::CrawlFrontier>(capcorpus::load_keywords(cfg.keywords_path));
  }
  auto search = capcorpus::FixtureSearchClient::load(cfg.search_fixture);
  auto videos = capcorpus::crawl(*frontier, search, {cfg.crawl_rounds, cfg.max_videos});

  const auto candidates = cfg.out_dir / "candidates.jsonl";
  std::ofstream out(candidates, std::ios::trunc);
  if (!out) throw capcorpus::IoError("cannot write " + candidates.string());
  for (const auto& v : videos) out << capcorpus::video_stub_to_json(v).dump() << '\n';
  frontier->save(frontier_path);
  std::cout << "candidates: " << videos.size() << " -> " << candidates.string() << "\n"
            << "pending:    " << frontier->pending_size() << "\n"
            << "frontier:   " << frontier_path.string() << "\n";
  return 0;
}

int run_process(const CommonFlags& flags, const std::string& input, bool json) {
  auto values = resolve_values(flags);
  if (!input.empty()) values["input"] = input;
  auto cfg = capcorpus::pipeline_config_from(values);
  if (cfg.input.empty()) throw capcorpus::ConfigError("process needs an input directory or candidate list");
  if (cfg.out_dir.empty()) throw capcorpus::ConfigError("process needs --out");
  auto summary = capcorpus::run_process(cfg);
  if (json) {
    std::cout << capcorpus::to_json(summary).dump(2) << "\n";
  } else {
    std::cout << capcorpus::format_summary(summary);
  }
  return 0;
}

int run_stats(const std::string& dir, bool json) {
  if (!std::filesystem::is_directory(dir)) throw capcorpus::IoError("no manifest directory '" + dir + "'");
  auto s = capcorpus::stats(dir);
  if (json) {
    std::cout << capcorpus::to_json(s).dump(2) << "\n";
    return 0;
  }
  std::printf("samples:      %zu\n", s.samples);
  std::printf("total hours:  %.4f (%.1f s)\n", s.total_hours, s.total_seconds);
  std::printf("deferred:     %zu cues\n", s.deferred_cues);
  std::printf("per channel:\n");
  for (const auto& [ch, n] : s.per_channel) std::printf("  %s: %zu\n", ch.c_str(), n);
  std::printf("rejected cues:\n");
  for (const auto& [reason, n] : s.reject_histogram) std::printf("  %s: %zu\n", reason.c_str(), n);
  return 0;
}

int run_review_serve(const std::string& dir, const std::string& bind, const std::string& ui_dir) {
  if (!std::filesystem::exists(std::filesystem::path(dir) / "manifest.jsonl")) {
    throw capcorpus::IoError("no manifest.jsonl in '" + dir + "'");
  }
  auto [host, port] = capcorpus::parse_bind_address(bind);
  capcorpus::ManifestStore store(dir);
  capcorpus::ReviewServer server(store, ui_dir);
  std::cout << "review service on http://" << host << ":" << port << " (" << store.size() << " samples)"
            << std::endl;
  server.serve(host, port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a filtered, aligned speech corpus from captioned videos"};
  app.require_subcommand(1);

  CommonFlags crawl_flags;
  auto* crawl = app.add_subcommand("crawl", "discover candidate videos and persist the frontier");
  add_common(crawl, crawl_flags);

  CommonFlags process_flags;
  std::string input;
  bool process_json = false;
  auto* process = app.add_subcommand("process", "filter, align and cut candidates into a manifest");
  process->add_option("input", input, "directory of video stubs or a candidates.jsonl");
  add_common(process, process_flags);
  process->add_flag("--json", process_json, "print the summary as JSON");

  std::string stats_dir;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "summarize a manifest directory");
  stats->add_option("manifest", stats_dir, "manifest directory")->required();
  stats->add_flag("--json", stats_json, "print JSON");

  std::string serve_dir;
  std::string bind = "127.0.0.1:8080";
  std::string ui_dir;
  auto* serve = app.add_subcommand("review-serve", "serve the review API and UI");
  serve->add_option("manifest", serve_dir, "manifest directory")->required();
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_option("--ui-dir", ui_dir, "directory with the built review UI");

  CLI11_PARSE(app, argc, argv);

  try {
    if (crawl->parsed()) return run_crawl(crawl_flags);
    if (process->parsed()) return run_process(process_flags, input, process_json);
    if (stats->parsed()) return run_stats(stats_dir, stats_json);
    if (serve->parsed()) return run_review_serve(serve_dir, bind, ui_dir);
  } catch (const capcorpus::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const capcorpus::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
