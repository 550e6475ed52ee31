#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pia/alignment/index.hpp"
#include "pia/errors.hpp"
#include "pia/geometry/geometry.hpp"
#include "pia/identity/drift.hpp"
#include "pia/synthgen/synthgen.hpp"

using namespace pia;
using namespace pia::synthgen;

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Synthgen, ProfilesValidate) {
  EXPECT_NO_THROW(real_profile().validate());
  for (const auto& c : fake_categories()) EXPECT_NO_THROW(fake_profile(c).validate());
  auto bad = real_profile();
  bad.jump_count = 2;
  EXPECT_THROW(bad.validate(), InvalidConfig);
  EXPECT_THROW(fake_profile("nope"), InvalidConfig);
}

TEST(Synthgen, GeometryMatchesPlantedShapes) {
  const auto video = generate_video(fake_profile("lip_sync"), SynthOptions{}, 5, "v");
  const auto extracted = extract_synthetic(video);
  ASSERT_EQ(extracted.cache.frames.size(), video.shapes.size());
  for (std::size_t i = 0; i < video.shapes.size(); ++i) {
    const auto& s = video.shapes[i];
    const auto& g = extracted.cache.frames[i].geometry;
    EXPECT_NEAR(g[2], geometry::mouth_aspect_ratio(s.height, s.width), 1e-6);
    EXPECT_NEAR(g[3], geometry::closure_score(geometry::mouth_aspect_ratio(s.height, s.width)), 1e-6);
  }
}

TEST(Synthgen, BilabialsCloseTheMouthInRealVideos) {
  SynthProfile p = real_profile();
  p.phoneme_script = {{kSilence, 0.2}, {"m", 0.2}, {"æ", 0.2}, {"p", 0.2}, {kSilence, 0.2}};
  const auto video = generate_video(p, SynthOptions{}, 1, "v");
  int bilabial = 0;
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    const double mar = geometry::mouth_aspect_ratio(video.shapes[i].height, video.shapes[i].width);
    const double t = static_cast<double>(i) / 25.0;
    if ((t >= 0.2 && t < 0.4) || (t >= 0.6 && t < 0.8)) {
      EXPECT_LT(mar, 0.1);
      ++bilabial;
    }
    if (t >= 0.4 && t < 0.6) {
      EXPECT_GT(mar, 0.5);
    }
  }
  EXPECT_EQ(bilabial, 10);
}

TEST(Synthgen, FaceSwapJumpsAreDetected) {
  auto p = fake_profile("face_swap");
  p.jump_count = 2;
  const auto video = generate_video(p, SynthOptions{}, 8, "v");
  ASSERT_EQ(video.jump_pairs.size(), 2u);
  std::vector<bool> all(video.identities.size(), true);
  const auto series = identity::drift_series(video.identities, all);
  for (std::size_t t = 0; t < series.l2.size(); ++t) {
    const bool jump = std::find(video.jump_pairs.begin(), video.jump_pairs.end(), static_cast<int>(t)) != video.jump_pairs.end();
    if (jump) {
      EXPECT_GE(series.l2[t], 9.0);
      EXPECT_LE(series.l2[t], 11.0);
    } else {
      EXPECT_LT(series.l2[t], 2.0);
    }
  }
}

TEST(Synthgen, RealIdentityDriftStaysInBand) {
  const SynthOptions options;
  double total = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto video = generate_video(real_profile(), options, static_cast<std::uint64_t>(seed), "v");
    const auto series = identity::drift_series(video.identities, std::vector<bool>(video.identities.size(), true));
    total += identity::drift_stats(series).mean_l2;
  }
  EXPECT_GT(total / 10, options.real_band_low);
  EXPECT_LT(total / 10, options.real_band_high);
}

TEST(Synthgen, DatasetIsByteIdentical) {
  const auto a = fs::temp_directory_path() / "pia_synth_a";
  const auto b = fs::temp_directory_path() / "pia_synth_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto summary = generate_dataset(3, 3, 11, a.string());
  generate_dataset(3, 3, 11, b.string());
  EXPECT_EQ(summary.videos, 6);
  const auto entries = alignment::read_index(summary.index_path);
  EXPECT_EQ(static_cast<int>(entries.size()), summary.groups);
  std::set<std::string> ids;
  for (const auto& e : entries) ids.insert(e.video_id);
  EXPECT_EQ(ids.size(), 6u);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    EXPECT_EQ(read_file(entry.path()), read_file(b / rel)) << rel;
  }
  std::ifstream manifests(a / "manifests.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(manifests, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("category") == "face_swap") {
      EXPECT_GT(j.at("jump_count").get<int>(), 0);
    }
    ++n;
  }
  EXPECT_EQ(n, 6);
  fs::remove_all(a);
  fs::remove_all(b);
}
