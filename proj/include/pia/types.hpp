#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pia {

inline constexpr int kMeshLandmarkCount = 468;
inline constexpr int kIdentityDim = 512;
inline constexpr int kCropSize = 112;
inline constexpr int kCropChannels = 3;
inline constexpr int kGeometryFeatures = 4;  // height, width, MAR, closure

// Frame-level label used for frames outside every phoneme interval.
inline constexpr const char* kSilence = "SIL";

enum class Label : int { kReal = 0, kFake = 1 };

std::string to_string(Label label);
Label label_from_string(const std::string& text);

struct WordSegment {
  std::string text;
  double start = 0.0;  // seconds
  double end = 0.0;

  bool operator==(const WordSegment&) const = default;
};

struct PhonemeInterval {
  std::string symbol;  // IPA
  double start = 0.0;  // seconds, half-open [start, end)
  double end = 0.0;

  bool operator==(const PhonemeInterval&) const = default;
};

struct Point2f {
  float x = 0.0f;
  float y = 0.0f;

  bool operator==(const Point2f&) const = default;
};

// Face-mesh landmarks in normalized image coordinates.
struct LandmarkSet {
  std::vector<Point2f> points;  // kMeshLandmarkCount entries when detected
  bool detected = false;
};

struct IdentityEmbedding {
  std::vector<float> vector;  // kIdentityDim components
  int frame_index = 0;
};

// Interleaved HWC intensities in [0, 1] unless stated otherwise.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> pixels;

  float at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

struct Frame {
  int index = 0;
  Image image;
};

// 112x112x3 HWC crop, normalized as (v - 0.5) / 0.5.
struct VisemeCrop {
  std::vector<float> pixels;
  int frame_index = 0;

  bool operator==(const VisemeCrop&) const = default;
};

using GeometryVector = std::array<float, kGeometryFeatures>;

struct FrameRecord {
  int frame_index = 0;
  double timestamp = 0.0;                 // frame_index / fps
  std::string phoneme = kSilence;
  bool face_detected = false;
  std::vector<Point2f> lip_landmarks;     // lip subset, in LipLandmarkIndexSet order
  GeometryVector geometry{};              // zeros when the face is missing
  std::optional<std::vector<float>> identity;
  bool valid = false;                     // mask bit: speech frame with a face

  bool operator==(const FrameRecord&) const = default;
};

struct VideoManifest {
  std::string id;
  double fps = 25.0;
  int frame_count = 0;
  Label label = Label::kReal;
  std::string category = "real";

  bool operator==(const VideoManifest&) const = default;
};

}  // namespace pia
