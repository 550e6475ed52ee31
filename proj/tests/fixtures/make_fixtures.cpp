// Regenerates the committed extractor fixtures: make_fixtures <dir>.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "pia/extractors/adapters.hpp"
#include "pia/extractors/audio.hpp"
#include "pia/extractors/mouth_model.hpp"
#include "pia/synthgen/synthgen.hpp"

using namespace pia;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <dir>\n");
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir / "frames");
  constexpr double kFps = 25.0;
  constexpr int kFrames = 38;

  const std::vector<WordSegment> words = {{"hello", 0.1, 0.5}, {"big", 0.6, 0.9}, {"world", 1.0, 1.4}};
  extractors::save_segments_json((dir / "transcript.json").string(), words);
  const std::vector<PhonemeInterval> phonemes = {
      {"h", 0.10, 0.16}, {"ə", 0.16, 0.25}, {"l", 0.25, 0.34}, {"o", 0.34, 0.50}, {"b", 0.60, 0.68},
      {"ɪ", 0.68, 0.80}, {"ɡ", 0.80, 0.90}, {"w", 1.00, 1.12}, {"ɝ", 1.12, 1.25}, {"l", 1.25, 1.32},
      {"d", 1.32, 1.40}};
  extractors::save_intervals_json((dir / "phonemes.json").string(), phonemes);

  extractors::AudioTrack audio;
  audio.sample_rate = 16000;
  const int n = static_cast<int>(1.52 * audio.sample_rate);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / audio.sample_rate;
    double v = 0.0;
    for (const auto& w : words) {
      if (t >= w.start && t < w.end) {
        const double env = std::sin(std::numbers::pi * (t - w.start) / (w.end - w.start));
        v = 0.3 * env * (std::sin(2 * std::numbers::pi * 140 * t) + 0.5 * std::sin(2 * std::numbers::pi * 700 * t));
      }
    }
    audio.samples.push_back(static_cast<float>(v));
  }
  extractors::write_wav_pcm16((dir / "hello.wav").string(), audio);

  Rng rng(11);
  const extractors::MouthRendering rendering;
  const std::array<double, 4> background{0.3, 1.1, 0.12, 0.17};
  std::vector<LandmarkSet> landmarks;
  std::vector<std::vector<float>> embeddings;
  for (int f = 0; f < kFrames; ++f) {
    const double t = f / kFps;
    std::string symbol = kSilence;
    for (const auto& p : phonemes) {
      if (t >= p.start && t < p.end) symbol = p.symbol;
    }
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03d.pgm", f);
    std::ofstream out(dir / "frames" / name, std::ios::binary);
    out << "P5\n" << kCropSize << ' ' << kCropSize << "\n255\n";
    if (f < 2) {  // camera still dark: no face
      out << std::string(static_cast<std::size_t>(kCropSize) * kCropSize, '\0');
      landmarks.push_back({});
      embeddings.emplace_back(kIdentityDim, 0.0f);
      continue;
    }
    const auto band = synthgen::viseme_band(symbol);
    extractors::MouthShape shape;
    shape.width = 0.5 * (band.width_low + band.width_high);
    shape.height = 0.5 * (band.mar_low + band.mar_high) * shape.width;
    const auto image = synthgen::render_frame(shape, rendering, background, 0.0, 0.0, rng);
    for (int y = 0; y < kCropSize; ++y) {
      for (int x = 0; x < kCropSize; ++x) out.put(static_cast<char>(std::lround(image.at(x, y, 0) * 255.0f)));
    }
    landmarks.push_back(extractors::mouth_mesh(shape));
    std::vector<float> e(kIdentityDim);
    for (int i = 0; i < kIdentityDim; ++i) e[i] = static_cast<float>(0.35 * std::sin(0.37 * i + 1.0) + 0.01 * rng.normal());
    embeddings.push_back(std::move(e));
  }
  extractors::save_landmarks_json((dir / "landmarks.json").string(), landmarks);
  extractors::save_embeddings_f32((dir / "embeddings.f32").string(), embeddings);
  return 0;
}
