#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "pia/alignment/alignment.hpp"
#include "pia/alignment/index.hpp"
#include "pia/errors.hpp"
#include "pia/util/random.hpp"

using namespace pia;
using namespace pia::alignment;

namespace {

std::vector<FrameLabel> run_of(const std::string& symbol, int first, int last) {
  std::vector<FrameLabel> out;
  for (int f = first; f <= last; ++f) out.push_back({f, symbol});
  return out;
}

}  // namespace

TEST(Vocabulary, IndexIsBijection) {
  std::set<std::string_view> seen;
  for (int i = 0; i < static_cast<int>(PhonemeVocabulary::kSize); ++i) {
    const auto s = PhonemeVocabulary::symbol(i);
    EXPECT_EQ(PhonemeVocabulary::index_of(s), i);
    seen.insert(s);
  }
  EXPECT_EQ(seen.size(), 14u);
  EXPECT_FALSE(PhonemeVocabulary::contains("ə"));
  EXPECT_FALSE(PhonemeVocabulary::contains(kSilence));
  EXPECT_TRUE(PhonemeVocabulary::contains("ɹ"));
  EXPECT_TRUE(PhonemeVocabulary::contains("ʃ"));
}

TEST(LabelFrames, FrameInsideInterval) {
  const auto labels = label_frames({{"m", 0.10, 0.20}}, 25.0, 10);
  ASSERT_EQ(labels.size(), 10u);
  EXPECT_EQ(labels[3].symbol, "m");  // t = 0.12
  EXPECT_EQ(labels[4].symbol, "m");  // t = 0.16
  EXPECT_EQ(labels[2].symbol, kSilence);  // t = 0.08
}

TEST(LabelFrames, NoIntervalsMeansSilence) {
  for (const auto& l : label_frames({}, 30.0, 7)) EXPECT_EQ(l.symbol, kSilence);
}

TEST(LabelFrames, HalfOpenBoundaries) {
  const double fps = 25.0;
  const double b = 4 / fps;  // exactly the timestamp of frame 4
  const auto labels = label_frames({{"p", 1 / fps, b}, {"o", b, 6 / fps}}, fps, 8);
  EXPECT_EQ(labels[1].symbol, "p");  // start is inclusive
  EXPECT_EQ(labels[3].symbol, "p");
  EXPECT_EQ(labels[4].symbol, "o");  // end is exclusive
  EXPECT_EQ(labels[6].symbol, kSilence);
}

TEST(LabelFrames, RejectsOverlapAndBadInput) {
  EXPECT_THROW(label_frames({{"p", 0.0, 0.2}, {"b", 0.1, 0.3}}, 25.0, 10), InvalidInput);
  EXPECT_THROW(label_frames({{"p", 0.2, 0.2}}, 25.0, 10), InvalidInput);
  EXPECT_THROW(label_frames({{"p", 0.0, 0.1}}, 0.0, 10), InvalidInput);
}

TEST(FilterVocabulary, KeepsOnlyVocabularySymbols) {
  const std::vector<FrameLabel> labels = {{0, "m"}, {1, kSilence}, {2, "ə"}, {3, "m"}};
  const auto kept = filter_vocabulary(labels);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].frame_index, 0);
  EXPECT_EQ(kept[1].frame_index, 3);
  EXPECT_TRUE(filter_vocabulary(label_frames({}, 25.0, 20)).empty());
}

TEST(FilterVocabulary, CountMatchesMembershipOracle) {
  Rng rng(3);
  const std::vector<std::string> pool = {"p", "ə", kSilence, "æ", "h", "ʃ", "l"};
  std::vector<FrameLabel> labels;
  for (int f = 0; f < 100; ++f) labels.push_back({f, pool[static_cast<std::size_t>(rng.uniform_int(0, 6))]});
  const auto expected = std::count_if(labels.begin(), labels.end(), [](const FrameLabel& l) {
    return l.symbol == "p" || l.symbol == "æ" || l.symbol == "ʃ";
  });
  EXPECT_EQ(static_cast<long>(filter_vocabulary(labels).size()), expected);
}

TEST(SampleGroups, ExactRunIsKept) {
  const auto groups = sample_groups(run_of("b", 7, 11));
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].frame_indices, (std::vector<int>{7, 8, 9, 10, 11}));
}

TEST(SampleGroups, LongRunSpreadsUniformly) {
  const auto groups = sample_groups(run_of("æ", 10, 20));
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].frame_indices, (std::vector<int>{10, 12, 15, 18, 20}));
}

TEST(SampleGroups, ShortRunPadsWithLastFrame) {
  const auto groups = sample_groups(run_of("m", 4, 6));
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].frame_indices, (std::vector<int>{4, 5, 6, 6, 6}));
}

TEST(SampleGroups, SplitsOnSymbolChangeAndGaps) {
  auto labels = run_of("m", 0, 2);
  const auto more = run_of("o", 3, 9);
  labels.insert(labels.end(), more.begin(), more.end());
  const auto later = run_of("o", 12, 13);  // same symbol after a gap is a new occurrence
  labels.insert(labels.end(), later.begin(), later.end());
  const auto groups = sample_groups(labels);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].symbol, "m");
  EXPECT_EQ(groups[1].frame_indices.front(), 3);
  EXPECT_EQ(groups[1].frame_indices.back(), 9);
  EXPECT_EQ(groups[2].frame_indices, (std::vector<int>{12, 13, 13, 13, 13}));
}

TEST(SampleGroups, PropertySubsetAscendingEndpoints) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int first = rng.uniform_int(0, 50);
    const int last = first + rng.uniform_int(0, 60);
    const auto g = sample_groups(run_of("s", first, last));
    ASSERT_EQ(g.size(), 1u);
    const auto& idx = g[0].frame_indices;
    ASSERT_EQ(idx.size(), 5u);
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(idx.front(), first);
    EXPECT_EQ(idx.back(), last);
    for (int f : idx) {
      EXPECT_GE(f, first);
      EXPECT_LE(f, last);
    }
  }
}

TEST(RoundHalfEven, Ties) {
  EXPECT_EQ(round_half_even_ratio(5, 2), 2);
  EXPECT_EQ(round_half_even_ratio(7, 2), 4);
  EXPECT_EQ(round_half_even_ratio(10, 4), 2);
  EXPECT_EQ(round_half_even_ratio(11, 4), 3);
  EXPECT_EQ(round_half_even_ratio(9, 4), 2);
}

TEST(Index, LineRoundTrip) {
  IndexEntry e;
  e.video_id = "v1";
  e.symbol = "ʃ";
  e.frame_indices = {1, 2, 3, 3, 3};
  e.label = Label::kFake;
  e.category = "face_swap";
  e.split = "test";
  e.cache = "cache/v1.pia";
  e.crop_offsets = {0, 1, 2, 2, 2};
  const auto line = index_line(e);
  EXPECT_NE(line.find("\"schema\":1"), std::string::npos);
  EXPECT_EQ(parse_index_line(line), e);
  EXPECT_THROW(parse_index_line("{\"schema\":1}"), InvalidDataset);
  EXPECT_THROW(parse_index_line("not json"), InvalidDataset);
}

TEST(Index, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "pia_index_test.jsonl").string();
  std::vector<IndexEntry> entries(3);
  for (int i = 0; i < 3; ++i) {
    entries[i].video_id = "v" + std::to_string(i);
    entries[i].symbol = "p";
    entries[i].frame_indices = {i, i, i, i, i};
    entries[i].crop_offsets = {0, 0, 0, 0, 0};
    entries[i].cache = "c.pia";
  }
  write_index(path, entries);
  EXPECT_EQ(read_index(path), entries);
  std::filesystem::remove(path);
}

TEST(Splits, StratifiedDisjointAndProportional) {
  std::vector<VideoRef> refs;
  for (int i = 0; i < 30; ++i) refs.push_back({"r" + std::to_string(i), Label::kReal, "real"});
  for (int i = 0; i < 20; ++i) refs.push_back({"f" + std::to_string(i), Label::kFake, "lip_sync"});
  const auto split = stratified_split(refs, 0.8, 5);
  ASSERT_EQ(split.size(), refs.size());
  int real_train = 0, fake_train = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    ASSERT_TRUE(split[i] == "train" || split[i] == "test");
    if (split[i] == "train") (refs[i].label == Label::kReal ? real_train : fake_train)++;
  }
  EXPECT_EQ(real_train, 24);
  EXPECT_EQ(fake_train, 16);
  EXPECT_EQ(stratified_split(refs, 0.8, 5), split);
  EXPECT_NE(stratified_split(refs, 0.8, 6), split);
}

TEST(Splits, LeaveCategoryOut) {
  std::vector<VideoRef> refs;
  for (int i = 0; i < 10; ++i) refs.push_back({"r" + std::to_string(i), Label::kReal, "real"});
  for (int i = 0; i < 9; ++i) {
    refs.push_back({"f" + std::to_string(i), Label::kFake, i % 3 == 0 ? "lip_sync" : i % 3 == 1 ? "face_swap" : "avatar"});
  }
  const auto split = leave_category_out_split(refs, "avatar", 0.8, 1);
  int real_test = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].label == Label::kFake) EXPECT_EQ(split[i], refs[i].category == "avatar" ? "test" : "train");
    if (refs[i].label == Label::kReal && split[i] == "test") ++real_test;
  }
  EXPECT_EQ(real_test, 2);
}
