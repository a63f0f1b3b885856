#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "capcorpus/config.hpp"
#include "capcorpus/pipeline.hpp"
#include "fixture_corpus.hpp"

namespace capcorpus {
namespace {

TEST(Config, ParsesKeyValueWithCommentsAndSections) {
  auto v = parse_config(
      "# run settings\n"
      "[filter]\n"
      "min_duration_s = 1.5   # trailing comment\n"
      "similarity_threshold=0.8\n"
      "\n"
      "[clients]\n"
      "asr_url = \"http://host:9000/asr#frag\"\n"
      "title = \"say \\\"hi\\\"\"\n");
  EXPECT_EQ(v.at("min_duration_s"), "1.5");
  EXPECT_EQ(v.at("similarity_threshold"), "0.8");
  EXPECT_EQ(v.at("asr_url"), "http://host:9000/asr#frag");
  EXPECT_EQ(v.at("title"), "say \"hi\"");
}

TEST(Config, ReportsLineNumbers) {
  try {
    parse_config("a = 1\nno equals sign\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_config("[open\n"), ConfigError);
  EXPECT_THROW(parse_config("k = \"unterminated\n"), ConfigError);
  EXPECT_THROW(parse_config("bad key = 1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/capcorpus.conf"), ConfigError);
}

TEST(Config, PrecedenceDefaultsFileEnvFlags) {
  testing::TempDir tmp;
  {
    std::ofstream out(tmp.path() / "run.conf");
    out << "probe_count = 5\nworkers = 2\nsimilarity_threshold = 0.6\n";
  }
  auto values = load_config(tmp.path() / "run.conf");
  ::setenv("CAPCORPUS_WORKERS", "3", 1);
  ::setenv("CAPCORPUS_SIMILARITY_THRESHOLD", "0.9", 1);
  apply_env_overrides(values, pipeline_config_keys());
  ::unsetenv("CAPCORPUS_WORKERS");
  ::unsetenv("CAPCORPUS_SIMILARITY_THRESHOLD");
  values["workers"] = "7";  // command-line flag

  auto cfg = pipeline_config_from(values);
  EXPECT_EQ(cfg.filter.probe_count, 5u);               // file
  EXPECT_DOUBLE_EQ(cfg.filter.similarity_threshold, 0.9);  // env over file
  EXPECT_EQ(cfg.workers, 7u);                           // flag over env
  EXPECT_DOUBLE_EQ(cfg.filter.min_duration_s, 1.0);     // default
}

TEST(Config, PipelineDefaults) {
  auto cfg = pipeline_config_from({});
  EXPECT_EQ(cfg.workers, 4u);
  EXPECT_EQ(cfg.asr, "echo");
  EXPECT_EQ(cfg.aligner, "threshold");
  EXPECT_EQ(cfg.merge.max_gap, Millis{1000});
  EXPECT_EQ(cfg.merge.max_span, Millis{10000});
  EXPECT_EQ(cfg.refine.step, Millis{100});
  EXPECT_EQ(cfg.refine.max_extension, Millis{500});
  EXPECT_DOUBLE_EQ(cfg.filter.similarity_threshold, 0.70);
  EXPECT_EQ(cfg.filter.probe_count, 3u);
}

TEST(Config, SeedFeedsProbeSelection) {
  auto cfg = pipeline_config_from({{"seed", "42"}});
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.filter.rng_seed, 42u);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(pipeline_config_from({{"asr", "whisper-magic"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from({{"workers", "0"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from({{"workers", "many"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from({{"aligner", "nope"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from({{"min_duration_s", "20"}}), ConfigError);
  EXPECT_THROW(pipeline_config_from({{"asr", "http"}}), ConfigError);
}

TEST(Config, EveryKnownKeyHasAnEnvName) {
  for (const auto& key : pipeline_config_keys()) {
    ConfigValues v;
    std::string name = "CAPCORPUS_";
    for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    ::setenv(name.c_str(), "x", 1);
    apply_env_overrides(v, pipeline_config_keys());
    ::unsetenv(name.c_str());
    EXPECT_EQ(v[key], "x") << key;
  }
}

}  // namespace
}  // namespace capcorpus
