#include "pia/extractors/pipeline.hpp"

#include <map>

#include "pia/errors.hpp"

namespace pia::extractors {

std::vector<PhonemeInterval> phonemes_from_audio(const AudioTrack& raw, Transcriber& transcriber,
                                                 Phonemizer& phonemizer) {
  const auto audio = canonicalize_audio(raw);
  return phonemizer.phonemize(transcriber.transcribe(audio));
}

ExtractedVideo extract_frames(VideoManifest manifest, const std::vector<PhonemeInterval>& intervals,
                              const std::vector<Frame>& frames, LandmarkDetector& detector,
                              IdentityEmbedder& embedder, const ExtractionConfig& config) {
  config.lips.validate();
  manifest.frame_count = static_cast<int>(frames.size());
  const auto labels = alignment::label_frames(intervals, manifest.fps, manifest.frame_count);

  ExtractedVideo out;
  std::vector<LandmarkSet> landmarks(frames.size());
  out.cache.frames.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& frame = frames[i];
    if (frame.index != static_cast<int>(i)) throw InvalidInput("frames must be indexed 0..n-1 in order");
    FrameRecord& r = out.cache.frames[i];
    r.frame_index = frame.index;
    r.timestamp = frame.index / manifest.fps;
    r.phoneme = labels[i].symbol;
    landmarks[i] = detector.detect(frame);
    r.face_detected = landmarks[i].detected;
    if (r.face_detected) {
      r.lip_landmarks = geometry::extract_lip_points(landmarks[i], config.lips);
      r.geometry = geometry::compute_geometry(landmarks[i], config.lips).to_vector();
      try {
        r.identity = embedder.embed(frame).vector;
      } catch (const NoFaceError&) {
        r.identity.reset();
      }
    }
    r.valid = r.phoneme != kSilence && r.face_detected;
  }

  out.groups = alignment::sample_groups(alignment::filter_vocabulary(labels), config.group_size);
  std::map<int, int> crop_position;
  for (const auto& g : out.groups) {
    std::vector<int> offsets;
    for (int f : g.frame_indices) {
      auto [it, inserted] = crop_position.try_emplace(f, static_cast<int>(out.cache.crops.size()));
      if (inserted) out.cache.crops.push_back(crop_mouth(frames[f], landmarks[f], config.lips, config.crop));
      offsets.push_back(it->second);
    }
    out.crop_offsets.push_back(std::move(offsets));
  }
  out.cache.manifest = std::move(manifest);
  return out;
}

std::vector<alignment::IndexEntry> index_entries(const ExtractedVideo& video, const std::string& cache_path,
                                                 const std::string& split) {
  std::vector<alignment::IndexEntry> entries;
  for (std::size_t g = 0; g < video.groups.size(); ++g) {
    alignment::IndexEntry e;
    e.video_id = video.cache.manifest.id;
    e.symbol = video.groups[g].symbol;
    e.frame_indices = video.groups[g].frame_indices;
    e.label = video.cache.manifest.label;
    e.category = video.cache.manifest.category;
    e.split = split;
    e.cache = cache_path;
    e.crop_offsets = video.crop_offsets[g];
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace pia::extractors
