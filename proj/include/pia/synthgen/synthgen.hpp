#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pia/extractors/mouth_model.hpp"
#include "pia/extractors/pipeline.hpp"
#include "pia/types.hpp"
#include "pia/util/random.hpp"

namespace pia::synthgen {

struct ScriptItem {
  std::string symbol;  // IPA symbol, or kSilence
  double duration = 0.0;  // seconds
};

struct SynthProfile {
  Label label = Label::kReal;
  std::string category = "real";
  double identity_step_sigma = 0.0191;  // per-component innovation of the identity walk
  double jump_magnitude = 10.0;
  int jump_count = 0;
  double viseme_consistency = 1.0;
  double artifact_strength = 0.0;       // amplitude of the mouth-region blending artifact
  std::vector<ScriptItem> phoneme_script;  // empty: drawn from the seed

  // Throws InvalidConfig for out-of-range fields or a real profile with jumps or inconsistency.
  void validate() const;
};

struct SynthOptions {
  double fps = 25.0;
  int runs_per_video = 5;         // vocabulary runs per drawn script
  int min_run_frames = 3;
  int max_run_frames = 8;
  int min_gap_frames = 2;          // separators between runs
  int max_gap_frames = 4;
  int edge_silence_frames = 4;     // leading and trailing silence
  double identity_norm = 8.0;      // norm of a speaker's base identity
  int speakers = 6;                // base identities shared by real and fake videos
  std::uint64_t speaker_seed = 0;  // seeds the speaker pool
  double identity_rho = 0.5;       // mean reversion of the identity walk
  bool raw_scale = false;          // multiply the identity walk by 8
  double real_band_low = 0.3;      // expected mean consecutive L2 of real videos (unit scale)
  double real_band_high = 0.7;
  extractors::MouthRendering rendering;
  double sensor_noise = 0.008;

  double identity_scale() const { return raw_scale ? 8.0 : 1.0; }
};

// Target MAR and width bands of a phoneme (or a separator symbol).
struct VisemeBand {
  double mar_low = 0.0;
  double mar_high = 0.0;
  double width_low = 0.45;
  double width_high = 0.55;
};
VisemeBand viseme_band(const std::string& symbol);

struct SynthVideo {
  VideoManifest manifest;
  SynthProfile profile;
  std::vector<PhonemeInterval> intervals;
  std::vector<Frame> frames;                        // rendered 112x112 face frames
  std::vector<extractors::MouthShape> shapes;       // ground-truth mouth per frame
  std::vector<LandmarkSet> landmarks;               // ground-truth meshes
  std::vector<std::vector<float>> identities;       // planted embeddings
  std::vector<int> jump_pairs;                      // pair t means frames (t, t+1)
  std::vector<bool> mismatched;                     // frame drew a mismatched viseme band
  std::vector<bool> frame_valid;                    // speech frame (all frames carry a face)
};

// Draws a script of runs_per_video vocabulary runs separated by silence or a
// neutral vowel, framed by silence. Durations are whole frames.
std::vector<ScriptItem> draw_script(const SynthOptions& options, std::uint64_t seed);

SynthVideo generate_video(const SynthProfile& profile, const SynthOptions& options, std::uint64_t seed,
                          const std::string& id = "video");

// Rendered frame of a mouth on the video's background. artifact > 0 overlays a
// one-pixel checkerboard (generator upsampling residue) around the mouth whose
// amplitude flickers per frame in [0.5, 1.5] x artifact.
Image render_frame(const extractors::MouthShape& shape, const extractors::MouthRendering& rendering,
                   const std::array<double, 4>& background_phase, double sensor_noise, double artifact, Rng& rng);

// Default profiles: real, lip_sync, face_swap, avatar.
SynthProfile real_profile();
SynthProfile fake_profile(const std::string& category);
const std::vector<std::string>& fake_categories();

// Runs the extraction pipeline with the ground-truth adapters.
extractors::ExtractedVideo extract_synthetic(const SynthVideo& video);

struct DatasetSummary {
  std::string index_path;
  int videos = 0;
  int groups = 0;
};

// Writes out_dir/cache/<id>.pia, out_dir/index.jsonl (80:20 stratified split)
// and out_dir/manifests.jsonl with the planted ground truth. Fakes cycle
// through the fake categories. The speaker pool is seeded by seed. Byte-identical
// for a fixed seed.
DatasetSummary generate_dataset(int n_real, int n_fake, std::uint64_t seed, const std::string& out_dir,
                                SynthOptions options = {});

}  // namespace pia::synthgen
