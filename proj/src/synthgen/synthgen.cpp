#include "pia/synthgen/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "pia/alignment/alignment.hpp"
#include "pia/alignment/index.hpp"
#include "pia/errors.hpp"
#include "pia/extractors/cache.hpp"
#include "pia/geometry/geometry.hpp"
#include "pia/util/random.hpp"

namespace pia::synthgen {

namespace {

constexpr const char* kNeutralVowel = "ə";

bool overlaps(const VisemeBand& a, const VisemeBand& b) { return a.mar_low < b.mar_high && b.mar_low < a.mar_high; }

std::vector<float> random_direction(Rng& rng, double norm) {
  std::vector<double> v(kIdentityDim);
  double sq = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    sq += x * x;
  }
  const double scale = norm / std::sqrt(sq);
  std::vector<float> out(kIdentityDim);
  for (int i = 0; i < kIdentityDim; ++i) out[i] = static_cast<float>(v[i] * scale);
  return out;
}

}  // namespace

void SynthProfile::validate() const {
  if (!(viseme_consistency >= 0.0 && viseme_consistency <= 1.0)) throw InvalidConfig("viseme_consistency outside [0, 1]");
  if (jump_count < 0) throw InvalidConfig("jump_count must be non-negative");
  if (!(identity_step_sigma >= 0.0)) throw InvalidConfig("identity_step_sigma must be non-negative");
  if (!(jump_magnitude >= 0.0)) throw InvalidConfig("jump_magnitude must be non-negative");
  if (!(artifact_strength >= 0.0 && artifact_strength <= 0.1)) throw InvalidConfig("artifact_strength outside [0, 0.1]");
  if (label == Label::kReal && (jump_count != 0 || viseme_consistency != 1.0)) {
    throw InvalidConfig("a real profile has no identity jumps and full viseme consistency");
  }
  for (const auto& item : phoneme_script) {
    if (item.symbol.empty() || !(item.duration > 0.0)) throw InvalidConfig("script items need a symbol and a positive duration");
  }
}

VisemeBand viseme_band(const std::string& s) {
  constexpr double kRoundLow = 0.38, kRoundHigh = 0.44;
  if (s == "p" || s == "b" || s == "m") return {0.0, 0.06};
  if (s == "f" || s == "v") return {0.10, 0.18};
  if (s == "t" || s == "s") return {0.18, 0.26};
  if (s == "k") return {0.28, 0.40};
  if (s == "w") return {0.20, 0.30, kRoundLow, kRoundHigh};
  if (s == "ɹ") return {0.22, 0.34};
  if (s == "i") return {0.12, 0.22, 0.50, 0.55};
  if (s == "æ") return {0.60, 0.80};
  if (s == "o") return {0.45, 0.60, kRoundLow, kRoundHigh};
  if (s == "ʃ") return {0.26, 0.36, kRoundLow, kRoundHigh};
  if (s == kSilence) return {0.02, 0.08};
  return {0.15, 0.30};  // neutral vowel and anything else
}

std::vector<ScriptItem> draw_script(const SynthOptions& o, std::uint64_t seed) {
  Rng rng(seed);
  const auto frames = [&](int n) { return n / o.fps; };
  std::vector<ScriptItem> script;
  script.push_back({kSilence, frames(o.edge_silence_frames)});
  for (int r = 0; r < o.runs_per_video; ++r) {
    const auto symbol = alignment::PhonemeVocabulary::symbol(
        rng.uniform_int(0, static_cast<int>(alignment::PhonemeVocabulary::kSize) - 1));
    script.push_back({std::string(symbol), frames(rng.uniform_int(o.min_run_frames, o.max_run_frames))});
    if (r + 1 < o.runs_per_video) {
      const bool silent = rng.bernoulli(0.5);
      script.push_back({silent ? kSilence : kNeutralVowel, frames(rng.uniform_int(o.min_gap_frames, o.max_gap_frames))});
    }
  }
  script.push_back({kSilence, frames(o.edge_silence_frames)});
  return script;
}

Image render_frame(const extractors::MouthShape& shape, const extractors::MouthRendering& r,
                   const std::array<double, 4>& bg, double sensor_noise, double artifact, Rng& rng) {
  Image im;
  im.width = kCropSize;
  im.height = kCropSize;
  im.channels = kCropChannels;
  im.pixels.resize(static_cast<std::size_t>(kCropSize) * kCropSize * kCropChannels);
  const double cx = shape.cx * kCropSize;
  const double cy = shape.cy * kCropSize;
  const double a = shape.width / 2.0 * kCropSize;
  const double b_in = shape.height / 2.0 * kCropSize;
  const double b_out = (shape.height / 2.0 + shape.thickness) * kCropSize;
  const double fa = 2.0 * a;
  const double fb = 2.0 * b_out + 3.0;
  const double gain = artifact > 0.0 ? artifact * rng.uniform(0.5, 1.5) : 0.0;
  for (int y = 0; y < kCropSize; ++y) {
    for (int x = 0; x < kCropSize; ++x) {
      const double px = x + 0.5 - cx;
      const double py = y + 0.5 - cy;
      double v = r.background + r.background_texture * (0.5 * std::sin(bg[0] + bg[2] * x) + 0.5 * std::sin(bg[1] + bg[3] * y));
      if (a > 0.0 && (px * px) / (a * a) + (py * py) / (b_out * b_out) <= 1.0) v = r.lip;
      if (a > 0.0 && b_in > 0.0 && (px * px) / (a * a) + (py * py) / (b_in * b_in) <= 1.0) v = r.cavity;
      if (gain > 0.0 && (px * px) / (fa * fa) + (py * py) / (fb * fb) <= 1.0) v += (x + y) % 2 == 0 ? gain : -gain;
      v += sensor_noise * rng.normal();
      const auto f = static_cast<float>(std::clamp(v, 0.0, 1.0));
      for (int c = 0; c < kCropChannels; ++c) im.at(x, y, c) = f;
    }
  }
  return im;
}

SynthVideo generate_video(const SynthProfile& profile, const SynthOptions& options, std::uint64_t seed,
                          const std::string& id) {
  profile.validate();
  if (!(options.fps > 0.0)) throw InvalidConfig("fps must be positive");
  if (options.speakers < 1) throw InvalidConfig("speakers must be >= 1");
  SynthVideo video;
  video.profile = profile;
  if (video.profile.phoneme_script.empty()) video.profile.phoneme_script = draw_script(options, derive_seed(seed, 1));

  // Script to whole frames and half-open intervals on frame boundaries.
  std::vector<std::string> frame_symbol;
  int frame = 0;
  for (const auto& item : video.profile.phoneme_script) {
    const int n = std::max(1, static_cast<int>(std::llround(item.duration * options.fps)));
    if (item.symbol != kSilence) {
      video.intervals.push_back({item.symbol, static_cast<double>(frame) / options.fps,
                                 static_cast<double>(frame + n) / options.fps});
    }
    frame_symbol.insert(frame_symbol.end(), static_cast<std::size_t>(n), item.symbol);
    frame += n;
  }
  const int frame_count = frame;
  video.manifest = {id, options.fps, frame_count, profile.label, profile.category};

  Rng shape_rng(derive_seed(seed, 2));
  std::vector<VisemeBand> vocab_bands;
  for (const auto s : alignment::PhonemeVocabulary::kSymbols) vocab_bands.push_back(viseme_band(std::string(s)));
  const bool fake = profile.label == Label::kFake;
  video.mismatched.assign(static_cast<std::size_t>(frame_count), false);
  video.frame_valid.resize(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    const auto& symbol = frame_symbol[static_cast<std::size_t>(f)];
    VisemeBand band = viseme_band(symbol);
    const bool speech = alignment::PhonemeVocabulary::contains(symbol);
    if (fake && speech && !shape_rng.bernoulli(profile.viseme_consistency)) {
      std::vector<const VisemeBand*> candidates;
      for (const auto& b : vocab_bands) {
        if (!overlaps(b, band)) candidates.push_back(&b);
      }
      band = *candidates[static_cast<std::size_t>(shape_rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
      video.mismatched[static_cast<std::size_t>(f)] = true;
    }
    extractors::MouthShape shape;
    shape.width = shape_rng.uniform(band.width_low, band.width_high);
    shape.height = shape_rng.uniform(band.mar_low, band.mar_high) * shape.width;
    shape.thickness = shape_rng.uniform(0.045, 0.055);
    video.shapes.push_back(shape);
    video.landmarks.push_back(extractors::mouth_mesh(shape));
    video.frame_valid[static_cast<std::size_t>(f)] = symbol != kSilence;
  }

  // Identity: speaker base vector plus a mean-reverting walk, with planted jumps.
  Rng id_rng(derive_seed(seed, 3));
  const double scale = options.identity_scale();
  Rng speaker_rng(derive_seed(options.speaker_seed, hash_tag("speaker") + id_rng.uniform_int(0, options.speakers - 1)));
  const auto base = random_direction(speaker_rng, options.identity_norm);
  const double rho = options.identity_rho;
  const double sigma = profile.identity_step_sigma;
  const double stationary = sigma / std::sqrt(1.0 - rho * rho);
  std::vector<double> offset(kIdentityDim);
  for (auto& o : offset) o = stationary * id_rng.normal();

  std::vector<int> candidates;
  for (int t = 0; t + 1 < frame_count; ++t) {
    if (video.frame_valid[static_cast<std::size_t>(t)] && video.frame_valid[static_cast<std::size_t>(t) + 1]) {
      candidates.push_back(t);
    }
  }
  // Prefer the opening part of the video; keep chosen pairs apart.
  std::vector<int> early;
  for (int t : candidates) {
    if (t < frame_count * 3 / 5) early.push_back(t);
  }
  auto& pool = static_cast<int>(early.size()) >= 2 * profile.jump_count ? early : candidates;
  for (int j = 0; j < profile.jump_count && !pool.empty(); ++j) {
    const int pick = pool[static_cast<std::size_t>(id_rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
    video.jump_pairs.push_back(pick);
    pool.erase(std::remove_if(pool.begin(), pool.end(), [&](int t) { return std::abs(t - pick) < 2; }), pool.end());
  }
  if (static_cast<int>(video.jump_pairs.size()) != profile.jump_count) {
    throw InvalidConfig("script too short for " + std::to_string(profile.jump_count) + " identity jumps");
  }
  std::sort(video.jump_pairs.begin(), video.jump_pairs.end());
  const auto jump = random_direction(id_rng, profile.jump_magnitude);

  std::vector<double> shift(kIdentityDim, 0.0);
  std::size_t next_jump = 0;
  for (int f = 0; f < frame_count; ++f) {
    if (f > 0) {
      for (auto& o : offset) o = rho * o + sigma * id_rng.normal();
      if (next_jump < video.jump_pairs.size() && video.jump_pairs[next_jump] == f - 1) {
        const double sign = next_jump % 2 == 0 ? 1.0 : -1.0;
        for (int i = 0; i < kIdentityDim; ++i) shift[i] += sign * jump[i];
        ++next_jump;
      }
    }
    std::vector<float> e(kIdentityDim);
    for (int i = 0; i < kIdentityDim; ++i) e[i] = static_cast<float>(scale * (base[i] + offset[i]) + shift[i]);
    video.identities.push_back(std::move(e));
  }

  // Frames.
  Rng pixel_rng(derive_seed(seed, 4));
  std::array<double, 4> bg{};
  bg[0] = pixel_rng.uniform(0.0, 2.0 * std::numbers::pi);
  bg[1] = pixel_rng.uniform(0.0, 2.0 * std::numbers::pi);
  bg[2] = pixel_rng.uniform(0.05, 0.25);
  bg[3] = pixel_rng.uniform(0.05, 0.25);
  for (int f = 0; f < frame_count; ++f) {
    video.frames.push_back({f, render_frame(video.shapes[static_cast<std::size_t>(f)], options.rendering, bg,
                                            options.sensor_noise, profile.artifact_strength, pixel_rng)});
  }
  return video;
}

SynthProfile real_profile() { return {}; }

const std::vector<std::string>& fake_categories() {
  static const std::vector<std::string> names = {"lip_sync", "face_swap", "avatar"};
  return names;
}

SynthProfile fake_profile(const std::string& category) {
  SynthProfile p;
  p.label = Label::kFake;
  p.category = category;
  p.artifact_strength = 0.06;
  if (category == "lip_sync") {
    p.viseme_consistency = 0.5;
  } else if (category == "face_swap") {
    p.jump_count = 3;
  } else if (category == "avatar") {
    p.viseme_consistency = 1.0;  // lips follow the audio; only the rendering betrays it
  } else {
    throw InvalidConfig("unknown fake category '" + category + "'");
  }
  return p;
}

extractors::ExtractedVideo extract_synthetic(const SynthVideo& video) {
  extractors::SyntheticLandmarkDetector detector(video.landmarks);
  extractors::SyntheticIdentityEmbedder embedder(video.identities);
  return extractors::extract_frames(video.manifest, video.intervals, video.frames, detector, embedder);
}

DatasetSummary generate_dataset(int n_real, int n_fake, std::uint64_t seed, const std::string& out_dir,
                                SynthOptions options) {
  options.speaker_seed = seed;
  if (n_real < 1 || n_fake < 1) throw InvalidConfig("need at least one real and one fake video");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "cache");

  struct Planned {
    std::string id;
    SynthProfile profile;
    std::uint64_t seed;
  };
  std::vector<Planned> planned;
  char id[32];
  for (int i = 0; i < n_real; ++i) {
    std::snprintf(id, sizeof id, "real_%04d", i);
    planned.push_back({id, real_profile(), derive_seed(seed, hash_tag(id))});
  }
  for (int i = 0; i < n_fake; ++i) {
    std::snprintf(id, sizeof id, "fake_%04d", i);
    planned.push_back({id, fake_profile(fake_categories()[static_cast<std::size_t>(i) % fake_categories().size()]),
                       derive_seed(seed, hash_tag(id))});
  }
  std::vector<alignment::VideoRef> refs;
  for (const auto& p : planned) refs.push_back({p.id, p.profile.label, p.profile.category});
  const auto splits = alignment::stratified_split(refs, 0.8, seed);

  DatasetSummary summary;
  summary.index_path = (fs::path(out_dir) / "index.jsonl").string();
  std::ofstream index(summary.index_path, std::ios::binary);
  std::ofstream manifests(fs::path(out_dir) / "manifests.jsonl", std::ios::binary);
  if (!index || !manifests) throw InvalidConfig("cannot write dataset files under " + out_dir);
  for (std::size_t k = 0; k < planned.size(); ++k) {
    const auto& p = planned[k];
    const auto video = generate_video(p.profile, options, p.seed, p.id);
    const auto extracted = extract_synthetic(video);
    const std::string cache_rel = "cache/" + p.id + ".pia";
    extractors::write_cache((fs::path(out_dir) / cache_rel).string(), extracted.cache.manifest, extracted.cache.frames,
                            extracted.cache.crops);
    for (const auto& e : extractors::index_entries(extracted, cache_rel, splits[k])) {
      index << alignment::index_line(e) << '\n';
      ++summary.groups;
    }
    int mismatched = 0;
    for (bool m : video.mismatched) mismatched += m ? 1 : 0;
    nlohmann::ordered_json m;
    m["id"] = p.id;
    m["label"] = to_string(p.profile.label);
    m["category"] = p.profile.category;
    m["split"] = splits[k];
    m["fps"] = options.fps;
    m["frame_count"] = video.manifest.frame_count;
    m["cache"] = cache_rel;
    m["jump_count"] = p.profile.jump_count;
    m["jump_pairs"] = video.jump_pairs;
    m["jump_magnitude"] = p.profile.jump_magnitude;
    m["viseme_consistency"] = p.profile.viseme_consistency;
    m["mismatched_frames"] = mismatched;
    m["artifact_strength"] = p.profile.artifact_strength;
    m["identity_scale"] = options.identity_scale();
    manifests << m.dump() << '\n';
    ++summary.videos;
  }
  return summary;
}

}  // namespace pia::synthgen
