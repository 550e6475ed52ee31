#pragma once

#include <string>
#include <vector>

#include "pia/geometry/geometry.hpp"
#include "pia/types.hpp"

namespace pia::extractors {

// Binary PPM (P6) or PGM (P5) with maxval 255. Throws DecodeError.
Image read_pnm(const std::string& path);

// Frames named in lexicographic order from a directory of .ppm/.pgm files.
std::vector<Frame> load_frame_directory(const std::string& directory);

// Splits a video into PPM frames and a 16 kHz mono WAV under work_dir using
// the ffmpeg executable. Throws DecodeError when ffmpeg fails or is missing.
struct DecodedVideo {
  std::vector<Frame> frames;
  std::string audio_path;
};
DecodedVideo decode_video(const std::string& video_path, const std::string& work_dir);

struct CropConfig {
  // Crop side as a fraction of the face width (distance between the face-edge landmarks).
  double face_ratio = 1.0;
  int face_left = 234;
  int face_right = 454;
  float mean = 0.5f;
  float stddev = 0.5f;
};

// Square crop centred on the mouth corners, resampled bilinearly to 112x112,
// replicated to three channels and normalized as (v - mean) / stddev. Without
// landmarks the largest centred square of the frame is used.
VisemeCrop crop_mouth(const Frame& frame, const LandmarkSet& landmarks, const geometry::LipLandmarkIndexSet& lips,
                      const CropConfig& config = {});

}  // namespace pia::extractors
