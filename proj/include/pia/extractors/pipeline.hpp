#pragma once

#include <string>
#include <vector>

#include "pia/alignment/alignment.hpp"
#include "pia/alignment/index.hpp"
#include "pia/extractors/adapters.hpp"
#include "pia/extractors/cache.hpp"
#include "pia/extractors/frames.hpp"
#include "pia/geometry/geometry.hpp"

namespace pia::extractors {

struct ExtractionConfig {
  geometry::LipLandmarkIndexSet lips = geometry::LipLandmarkIndexSet::standard();
  CropConfig crop;
  int group_size = 5;
};

struct ExtractedVideo {
  VideoCache cache;
  std::vector<alignment::GroupSkeleton> groups;
  std::vector<std::vector<int>> crop_offsets;  // per group, positions in cache.crops
};

// Canonicalizes the audio, transcribes it and aligns phonemes.
std::vector<PhonemeInterval> phonemes_from_audio(const AudioTrack& raw, Transcriber& transcriber,
                                                 Phonemizer& phonemizer);

// Per-frame labels, landmarks, geometry and identity; phoneme groups; and
// crops for every frame referenced by a group. manifest.frame_count is set
// from the frames.
ExtractedVideo extract_frames(VideoManifest manifest, const std::vector<PhonemeInterval>& intervals,
                              const std::vector<Frame>& frames, LandmarkDetector& detector,
                              IdentityEmbedder& embedder, const ExtractionConfig& config = {});

// Index lines for the video's groups.
std::vector<alignment::IndexEntry> index_entries(const ExtractedVideo& video, const std::string& cache_path,
                                                 const std::string& split);

}  // namespace pia::extractors
