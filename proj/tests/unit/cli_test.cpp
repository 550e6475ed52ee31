#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pia/cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pia");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = pia::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pia_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndBadFlags) {
  EXPECT_EQ(run({"train", "--help"}).code, 0);
  EXPECT_EQ(run({"train", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(Cli, SynthWritesDataset) {
  const auto r = run({"synth", "--real", "2", "--fake", "2", "--seed", "7", "--out", path("data")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("data/index.jsonl")));
  EXPECT_TRUE(fs::exists(path("data/manifests.jsonl")));
  EXPECT_NE(r.out.find("config synth:"), std::string::npos);
}

TEST_F(Cli, UnknownConfigKeyIsRejected) {
  std::ofstream(path("bad.json")) << R"({"epochs": 1, "learning_rte": 0.1})";
  const auto r = run({"train", "--config", path("bad.json"), "--data", path("bad.json"), "--out", path("run")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("InvalidConfig"), std::string::npos);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  ASSERT_EQ(run({"synth", "--real", "3", "--fake", "3", "--seed", "1", "--out", path("data")}).code, 0);
  std::ofstream(path("cfg.json")) << R"({"epochs": 5, "batch_size": 4})";
  const auto r = run({"train", "--config", path("cfg.json"), "--epochs", "1", "--data", path("data/index.jsonl"), "--out",
                      path("run"), "--split", ""});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"epochs\":1"), std::string::npos);
  EXPECT_NE(r.out.find("\"batch_size\":4"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("run/model.ckpt")));
  EXPECT_TRUE(fs::exists(path("run/train_log.jsonl")));
}

TEST_F(Cli, EvalOnSingleClassIsMetricError) {
  ASSERT_EQ(run({"synth", "--real", "3", "--fake", "3", "--seed", "2", "--out", path("data")}).code, 0);
  ASSERT_EQ(run({"train", "--epochs", "1", "--data", path("data/index.jsonl"), "--out", path("run"), "--split", ""}).code, 0);
  // Keep only the real videos in the index.
  std::ifstream in(path("data/index.jsonl"));
  std::ofstream reals(path("data/reals.jsonl"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("\"label\":\"real\"") != std::string::npos) reals << line << '\n';
  }
  reals.close();
  const auto r = run({"eval", "--ckpt", path("run/model.ckpt"), "--data", path("data/reals.jsonl"), "--out", path("eval"),
                      "--split", ""});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("MetricError"), std::string::npos) << r.err;
}

TEST_F(Cli, AnalyzeDriftWritesArtifacts) {
  ASSERT_EQ(run({"synth", "--real", "1", "--fake", "3", "--seed", "4", "--out", path("data")}).code, 0);
  const auto r = run({"analyze-drift", "--cache", path("data/cache/real_0000.pia"), "--cache",
                      path("data/cache/fake_0001.pia"), "--out", path("drift")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("drift/drift_real_0000.csv")));
  EXPECT_TRUE(fs::exists(path("drift/drift_stats.json")));
  EXPECT_TRUE(fs::exists(path("drift/drift.png")));
  const auto g = run({"analyze-geometry", "--cache", path("data/cache/real_0000.pia"), "--out", path("geom")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(fs::exists(path("geom/geometry_real_0000.csv")));
}
