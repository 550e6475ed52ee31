#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pia/errors.hpp"
#include "pia/harness/config.hpp"
#include "pia/harness/dataset.hpp"
#include "pia/harness/evaluate.hpp"
#include "pia/harness/metrics.hpp"
#include "pia/harness/train.hpp"
#include "pia/synthgen/synthgen.hpp"
#include "pia/util/random.hpp"

using namespace pia;
using namespace pia::harness;

namespace fs = std::filesystem;

namespace {

// Pairwise AUC oracle with ties counting one half.
double auc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      ++pairs;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / static_cast<double>(pairs);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

model::ModelConfig tiny_model() {
  model::ModelConfig c;
  c.d = 8;
  c.heads = 2;
  c.key_dim = 4;
  c.geometry_hidden = 8;
  c.identity_hidden = 8;
  c.head_hidden = 8;
  c.conv3d_channels = 2;
  c.backbone_channels = {4, 4};
  return c;
}

}  // namespace

TEST(Metrics, Examples) {
  const std::vector<double> perfect{0.9, 0.8, 0.2, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  EXPECT_EQ(roc_auc(perfect, y), 1.0);
  EXPECT_EQ(average_precision(perfect, y), 1.0);
  EXPECT_EQ(accuracy(perfect, y), 1.0);
  const std::vector<double> tied(4, 0.5);
  EXPECT_EQ(roc_auc(tied, y), 0.5);
  EXPECT_EQ(accuracy(tied, y), 0.5);
  const std::vector<double> inverted{0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(roc_auc(inverted, y), 0.0);
  // Positives ranked 1 and 3: AP = (1/1 + 2/3) / 2.
  const std::vector<double> mixed{0.9, 0.5, 0.7, 0.1};
  EXPECT_NEAR(average_precision(mixed, y), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(Metrics, SingleClassThrows) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<int> y{1, 1};
  EXPECT_THROW(roc_auc(s, y), MetricError);
  EXPECT_THROW(average_precision(s, y), MetricError);
  EXPECT_THROW(report_from_scores({{"a", Label::kReal, "real", 0.2}, {"b", Label::kReal, "real", 0.3}}), MetricError);
}

TEST(Metrics, AucMatchesPairOracle) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 40);
    std::vector<double> s(static_cast<std::size_t>(n));
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      s[static_cast<std::size_t>(i)] = rng.uniform_int(0, 10) / 10.0;  // many ties
      y[static_cast<std::size_t>(i)] = i < 1 ? 1 : i < 2 ? 0 : rng.uniform_int(0, 1);
    }
    EXPECT_NEAR(roc_auc(s, y), auc_oracle(s, y), 1e-12);
    const auto curve = roc_curve(s, y);
    ASSERT_GE(curve.size(), 2u);
    EXPECT_EQ(curve.front().fpr, 0.0);
    EXPECT_EQ(curve.back().tpr, 1.0);
    const double ap = average_precision(s, y);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
  }
}

TEST(Report, CategoriesUseRealsAsNegatives) {
  std::vector<VideoScore> scores = {
      {"r0", Label::kReal, "real", 0.1},      {"r1", Label::kReal, "real", 0.6},
      {"f0", Label::kFake, "lip_sync", 0.9},  {"f1", Label::kFake, "avatar", 0.4},
  };
  const auto r = report_from_scores(scores);
  EXPECT_EQ(r.n_videos, 4);
  EXPECT_DOUBLE_EQ(r.acc, 50.0);
  EXPECT_DOUBLE_EQ(r.auc, 75.0);
  EXPECT_DOUBLE_EQ(*r.categories.at("lip_sync").auc, 100.0);
  EXPECT_EQ(r.categories.at("lip_sync").n_videos, 1);
  EXPECT_DOUBLE_EQ(*r.categories.at("avatar").auc, 50.0);
  EXPECT_FALSE(r.categories.at("real").auc.has_value());
  const auto j = report_json(r, {{"split", "test"}});
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("run").at("split"), "test");
  EXPECT_TRUE(j.at("categories").at("real").at("auc").is_null());
}

TEST(TrainConfig, UnknownKeysAndValidation) {
  TrainConfig c;
  EXPECT_THROW(c.apply_json({{"learning_rte", 0.1}}), InvalidConfig);
  c.apply_json({{"epochs", 3}, {"lambda", 0.5}});
  EXPECT_EQ(c.epochs, 3);
  EXPECT_EQ(c.lambda, 0.5);
  c.epochs = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  EXPECT_THROW(c.apply_json({{"epochs", "many"}}), InvalidConfig);
}

class HarnessData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = (fs::temp_directory_path() / "pia_harness_test").string();
    fs::remove_all(dir_);
    synthgen::generate_dataset(6, 6, 3, dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string dir_;
};

std::string HarnessData::dir_;

TEST_F(HarnessData, LoadsSplitsAndValidatesClasses) {
  const auto all = load_dataset(dir_ + "/index.jsonl");
  EXPECT_EQ(all.videos.size(), 12u);
  EXPECT_EQ(all.count(Label::kFake), 6u);
  const auto train_set = load_dataset(dir_ + "/index.jsonl", "train");
  const auto test_set = load_dataset(dir_ + "/index.jsonl", "test");
  EXPECT_EQ(train_set.videos.size() + test_set.videos.size(), 12u);
  for (const auto& v : all.videos) {
    EXPECT_FALSE(v.groups.empty());
    for (const auto& g : v.groups) EXPECT_EQ(g.crops.size(), 5u);
  }
  Dataset reals;
  for (const auto& v : all.videos) {
    if (v.label == Label::kReal) reals.videos.push_back(v);
  }
  EXPECT_THROW(require_both_classes(reals, "train"), InvalidDataset);
  EXPECT_THROW(load_dataset(dir_ + "/missing.jsonl"), InvalidDataset);
}

TEST_F(HarnessData, TrainingIsDeterministic) {
  const auto data = load_dataset(dir_ + "/index.jsonl");
  TrainConfig c;
  c.epochs = 2;
  c.batch_size = 4;
  c.seed = 5;
  const auto a = train(tiny_model(), data, c, dir_ + "/run_a");
  const auto b = train(tiny_model(), data, c, dir_ + "/run_b");
  EXPECT_EQ(a.history.size(), 6u);
  EXPECT_EQ(read_file(a.checkpoint), read_file(b.checkpoint));
  EXPECT_EQ(read_file(a.log), read_file(b.log));
  for (const auto& h : a.history) {
    EXPECT_TRUE(std::isfinite(h.total));
    EXPECT_NEAR(h.total, h.ce + c.lambda * h.arcface, 1e-9);
  }
  const auto report = evaluate(*a.model, data);
  EXPECT_EQ(report.n_videos, 12);
  EXPECT_GE(report.auc, 0.0);
  EXPECT_LE(report.auc, 100.0);
}
