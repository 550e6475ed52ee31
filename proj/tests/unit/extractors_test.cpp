#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pia/alignment/alignment.hpp"
#include "pia/errors.hpp"
#include "pia/extractors/adapters.hpp"
#include "pia/extractors/audio.hpp"
#include "pia/extractors/cache.hpp"
#include "pia/extractors/container.hpp"
#include "pia/extractors/frames.hpp"
#include "pia/extractors/mouth_model.hpp"
#include "pia/extractors/pipeline.hpp"
#include "pia/geometry/geometry.hpp"
#include "pia/synthgen/synthgen.hpp"
#include "pia/util/random.hpp"

using namespace pia;
using namespace pia::extractors;

namespace {

const std::string kFixtures = PIA_FIXTURE_DIR;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pia_extractors_" + name)).string();
}

Frame gray_frame(int index, float value) {
  Frame f;
  f.index = index;
  f.image = {kCropSize, kCropSize, 3, std::vector<float>(static_cast<std::size_t>(kCropSize) * kCropSize * 3, value)};
  return f;
}

}  // namespace

// ------------------------------------------------------------------- audio

TEST(Audio, StereoIsAveragedToMono) {
  AudioTrack raw;
  raw.sample_rate = kCanonicalSampleRate;
  raw.channels = 2;
  raw.samples = {0.2f, 0.4f, -1.0f, 1.0f, 0.5f, 0.5f};
  const auto a = canonicalize_audio(raw);
  EXPECT_EQ(a.channels, 1);
  EXPECT_EQ(a.sample_rate, kCanonicalSampleRate);
  ASSERT_EQ(a.samples.size(), 3u);
  EXPECT_NEAR(a.samples[0], 0.3f, 1e-7);
  EXPECT_EQ(a.samples[1], 0.0f);
  EXPECT_EQ(a.samples[2], 0.5f);
}

TEST(Audio, ResamplingKeepsDurationAndLowFrequencies) {
  AudioTrack raw;
  raw.sample_rate = 44100;
  for (int i = 0; i < 44100; ++i) raw.samples.push_back(static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / 44100.0)));
  const auto a = canonicalize_audio(raw);
  EXPECT_EQ(a.samples.size(), 16000u);
  EXPECT_NEAR(a.duration(), 1.0, 1e-9);
  double max_err = 0.0;
  for (int i = 200; i < 15800; ++i) {
    max_err = std::max(max_err, std::abs(a.samples[static_cast<std::size_t>(i)] -
                                         0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / 16000.0)));
  }
  EXPECT_LT(max_err, 0.01);
}

TEST(Audio, RejectsBadTracks) {
  EXPECT_THROW(canonicalize_audio({}), InvalidInput);
  AudioTrack odd;
  odd.sample_rate = 8000;
  odd.channels = 2;
  odd.samples = {0.1f, 0.2f, 0.3f};
  EXPECT_THROW(canonicalize_audio(odd), InvalidInput);
}

TEST(Audio, WavRoundTripAndSilence) {
  const auto wav = read_wav(kFixtures + "/hello.wav");
  EXPECT_EQ(wav.sample_rate, 16000);
  EXPECT_NEAR(wav.duration(), 1.52, 1e-9);
  EXPECT_FALSE(is_silent(wav));
  const auto path = temp_path("rt.wav");
  write_wav_pcm16(path, wav);
  const auto back = read_wav(path);
  ASSERT_EQ(back.samples.size(), wav.samples.size());
  for (std::size_t i = 0; i < wav.samples.size(); ++i) EXPECT_NEAR(back.samples[i], wav.samples[i], 1.0 / 32767);
  std::filesystem::remove(path);
  AudioTrack quiet{std::vector<float>(100, 0.0f), 16000, 1};
  EXPECT_TRUE(is_silent(quiet));
  EXPECT_THROW(read_wav(kFixtures + "/transcript.json"), DecodeError);
}

// ---------------------------------------------------------------- adapters

TEST(Adapters, FixtureTranscriptIsOrderedWithinDuration) {
  const auto audio = canonicalize_audio(read_wav(kFixtures + "/hello.wav"));
  FixtureTranscriber t(kFixtures + "/transcript.json");
  const auto words = t.transcribe(audio);
  ASSERT_EQ(words.size(), 3u);
  EXPECT_EQ(words[0].text, "hello");
  EXPECT_EQ(words[2].text, "world");
  for (std::size_t i = 0; i < words.size(); ++i) {
    EXPECT_LT(words[i].start, words[i].end);
    EXPECT_LE(words[i].end, audio.duration());
    if (i > 0) {
      EXPECT_LE(words[i - 1].end, words[i].start);
    }
  }
}

TEST(Adapters, SilentAudioYieldsNoWords) {
  AudioTrack quiet{std::vector<float>(16000, 0.0f), 16000, 1};
  FixtureTranscriber t(kFixtures + "/transcript.json");
  EXPECT_TRUE(t.transcribe(quiet).empty());
}

TEST(Adapters, FixturePhonemesAreContained) {
  const auto audio = canonicalize_audio(read_wav(kFixtures + "/hello.wav"));
  FixtureTranscriber t(kFixtures + "/transcript.json");
  FixturePhonemizer p(kFixtures + "/phonemes.json");
  const auto intervals = phonemes_from_audio(audio, t, p);
  ASSERT_EQ(intervals.size(), 11u);
  EXPECT_TRUE(phonemes_contained(t.transcribe(audio), intervals));
  const auto labels = alignment::label_frames(intervals, 25.0, 38);
  const auto groups = alignment::sample_groups(alignment::filter_vocabulary(labels));
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].symbol, "o");
  EXPECT_EQ(groups[1].symbol, "b");
  EXPECT_EQ(groups[2].symbol, "w");
}

TEST(Adapters, ReferencePhonemizerSplitsWordsEvenly) {
  EXPECT_EQ(ReferencePhonemizer::word_to_phonemes("map"), (std::vector<std::string>{"m", "æ", "p"}));
  EXPECT_EQ(ReferencePhonemizer::word_to_phonemes("Show"), (std::vector<std::string>{"ʃ", "o"}));
  ReferencePhonemizer p;
  const auto out = p.phonemize({{"map", 0.3, 0.6}});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_NEAR(out[0].end, 0.4, 1e-12);
  EXPECT_NEAR(out[1].end, 0.5, 1e-12);
  EXPECT_EQ(out[2].end, 0.6);
  EXPECT_THROW(p.phonemize({{"map", 0.6, 0.6}}), InvalidInput);
}

TEST(Adapters, BlackFrameHasNoFace) {
  const auto frames = load_frame_directory(kFixtures + "/frames");
  ASSERT_EQ(frames.size(), 38u);
  EXPECT_TRUE(is_black(frames[0].image));
  FixtureLandmarkDetector d(kFixtures + "/landmarks.json");
  EXPECT_FALSE(d.detect(frames[0]).detected);
  EXPECT_TRUE(d.detect(frames[5]).detected);
  FixtureIdentityEmbedder e(kFixtures + "/embeddings.f32");
  EXPECT_THROW(e.embed(frames[1]), NoFaceError);
  EXPECT_EQ(e.embed(frames[5]).vector.size(), static_cast<std::size_t>(kIdentityDim));
}

TEST(Adapters, CorruptFrameIsRejected) {
  Frame bad = gray_frame(0, 0.5f);
  bad.image.pixels.pop_back();
  FixtureLandmarkDetector d(kFixtures + "/landmarks.json");
  EXPECT_THROW(d.detect(bad), DecodeError);
  Frame nan = gray_frame(0, 0.5f);
  nan.image.pixels[7] = NAN;
  EXPECT_THROW(d.detect(nan), DecodeError);
}

TEST(Adapters, AdapterKindNames) {
  for (auto k : {AdapterKind::kLive, AdapterKind::kFixture, AdapterKind::kSynthetic}) {
    EXPECT_EQ(adapter_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(adapter_kind_from_string("bogus"), InvalidConfig);
}

// ------------------------------------------------------------------- mouth

TEST(MouthModel, DetectorRecoversRenderedShape) {
  Rng rng(12);
  MouthRendering rendering;
  for (int i = 0; i < 40; ++i) {
    MouthShape s;
    s.cx = rng.uniform(0.45, 0.55);
    s.cy = rng.uniform(0.55, 0.65);
    s.width = rng.uniform(0.4, 0.55);
    s.height = rng.uniform(0.0, 0.3);
    const std::array<double, 4> phase{rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0, 6)};
    Frame f;
    f.index = 0;
    f.image = synthgen::render_frame(s, rendering, phase, 0.008, 0.0, rng);
    MouthImageLandmarkDetector d(rendering);
    const auto lm = d.detect(f);
    ASSERT_TRUE(lm.detected);
    const auto truth = mouth_mesh(s);
    for (int idx : {13, 14, 61, 291}) {
      EXPECT_NEAR(lm.points[idx].x * kCropSize, truth.points[idx].x * kCropSize, 2.0) << idx;
      EXPECT_NEAR(lm.points[idx].y * kCropSize, truth.points[idx].y * kCropSize, 2.0) << idx;
    }
  }
}

TEST(MouthModel, MeshGeometryMatchesShape) {
  MouthShape s;
  s.width = 0.5;
  s.height = 0.1;
  const auto g = geometry::compute_geometry(mouth_mesh(s), geometry::LipLandmarkIndexSet::standard());
  EXPECT_NEAR(g.lip_width, 0.5, 1e-6);
  EXPECT_NEAR(g.lip_height, 0.1, 1e-6);
}

TEST(Crop, CentredOnMouthAndNormalised) {
  Frame f = gray_frame(3, 0.5f);
  // Bright pixel at the mouth centre.
  MouthShape s;
  s.cx = 0.25;
  s.cy = 0.75;
  const auto mesh = mouth_mesh(s);
  const int px = static_cast<int>(s.cx * kCropSize), py = static_cast<int>(s.cy * kCropSize);
  for (int c = 0; c < 3; ++c) f.image.at(px, py, c) = 1.0f;
  const auto crop = crop_mouth(f, mesh, geometry::LipLandmarkIndexSet::standard());
  EXPECT_EQ(crop.frame_index, 3);
  ASSERT_EQ(crop.pixels.size(), static_cast<std::size_t>(kCropSize) * kCropSize * 3);
  float lo = 1e9f, hi = -1e9f;
  int best = 0;
  for (std::size_t i = 0; i < crop.pixels.size(); ++i) {
    lo = std::min(lo, crop.pixels[i]);
    if (crop.pixels[i] > hi) {
      hi = crop.pixels[i];
      best = static_cast<int>(i);
    }
  }
  EXPECT_GE(lo, -1.0f);
  EXPECT_LE(hi, 1.0f);
  EXPECT_NEAR(lo, 0.0f, 1e-6);  // gray 0.5 maps to 0
  const int bx = (best / 3) % kCropSize, by = (best / 3) / kCropSize;
  EXPECT_NEAR(bx, kCropSize / 2, 3);
  EXPECT_NEAR(by, kCropSize / 2, 3);
}

// ------------------------------------------------------------------- cache

TEST(Container, RoundTripAndErrors) {
  Container c;
  c.magic = "TEST";
  c.version = 3;
  c.metadata = {{"k", 1}};
  c.blobs = {{"a", {1.0f, 2.5f}}, {"b", {}}};
  const auto bytes = serialize_container(c);
  const auto back = parse_container(bytes, "TEST", 3);
  EXPECT_EQ(back.blobs, c.blobs);
  EXPECT_EQ(back.metadata, c.metadata);
  EXPECT_THROW(back.blob("missing"), CacheError);
  EXPECT_THROW(parse_container(bytes, "NOPE", 3), CacheError);
  EXPECT_THROW(parse_container(bytes, "TEST", 4), CacheError);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(parse_container(truncated, "TEST", 3), CacheError);
}

TEST(Cache, FixtureExtractionRoundTrip) {
  const auto audio = canonicalize_audio(read_wav(kFixtures + "/hello.wav"));
  FixtureTranscriber t(kFixtures + "/transcript.json");
  FixturePhonemizer p(kFixtures + "/phonemes.json");
  FixtureLandmarkDetector d(kFixtures + "/landmarks.json");
  FixtureIdentityEmbedder e(kFixtures + "/embeddings.f32");
  VideoManifest m;
  m.id = "hello";
  m.fps = 25.0;
  m.frame_count = 38;
  const auto frames = load_frame_directory(kFixtures + "/frames");
  const auto video = extract_frames(m, phonemes_from_audio(audio, t, p), frames, d, e);

  ASSERT_EQ(video.cache.frames.size(), 38u);
  EXPECT_FALSE(video.cache.frames[0].face_detected);
  EXPECT_FALSE(video.cache.frames[0].valid);
  EXPECT_FALSE(video.cache.frames[0].identity.has_value());
  EXPECT_EQ(video.cache.frames[0].geometry, (GeometryVector{0, 0, 0, 0}));
  EXPECT_TRUE(video.cache.frames[10].valid);
  EXPECT_EQ(video.cache.frames[10].phoneme, "o");
  ASSERT_EQ(video.groups.size(), 3u);
  for (std::size_t g = 0; g < video.groups.size(); ++g) {
    ASSERT_EQ(video.crop_offsets[g].size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_EQ(video.cache.crops[static_cast<std::size_t>(video.crop_offsets[g][k])].frame_index,
                video.groups[g].frame_indices[k]);
    }
  }

  const auto path = temp_path("hello.pia");
  write_cache(path, video.cache.manifest, video.cache.frames, video.cache.crops);
  const auto back = read_cache(path);
  EXPECT_EQ(back.manifest, video.cache.manifest);
  EXPECT_EQ(back.frames, video.cache.frames);
  EXPECT_EQ(back.crops, video.cache.crops);
  EXPECT_THROW(read_cache(path, kCacheFormatVersion + 1), CacheError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_cache(temp_path("missing.pia")), CacheError);

  const auto entries = index_entries(video, "cache/hello.pia", "train");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[1].symbol, "b");
  EXPECT_EQ(entries[1].frame_indices.front(), 15);
}

TEST(Cache, EmbeddingFileRoundTrip) {
  std::vector<std::vector<float>> e(2, std::vector<float>(kIdentityDim, 0.25f));
  e[1][7] = -3.5f;
  const auto path = temp_path("emb.f32");
  save_embeddings_f32(path, e);
  EXPECT_EQ(load_embeddings_f32(path), e);
  std::filesystem::remove(path);
}
