#pragma once

#include <vector>

#include "pia/extractors/adapters.hpp"
#include "pia/types.hpp"

namespace pia::extractors {

// Elliptical mouth in normalized image coordinates. The inner contour has
// semi-axes (width / 2, height / 2); the outer contour adds the lip thickness
// vertically.
struct MouthShape {
  double cx = 0.5;
  double cy = 0.5;
  double width = 0.45;
  double height = 0.1;
  double thickness = 0.05;
};

// Mesh indices of the full outer and inner lip rings, each 20 points starting
// at the left corner and running over the upper lip.
const std::vector<int>& outer_lip_ring();
const std::vector<int>& inner_lip_ring();

// Face-edge landmarks used to size mouth crops.
inline constexpr int kFaceLeftEdge = 234;
inline constexpr int kFaceRightEdge = 454;

// A 468-point mesh: a fixed face template with the lip rings placed on the
// mouth ellipses. Ring point k sits at angle pi - k*pi/10.
LandmarkSet mouth_mesh(const MouthShape& shape);

// Intensity model shared by the renderer and the image-based detector.
struct MouthRendering {
  float background = 0.7f;
  float background_texture = 0.06f;
  float lip = 0.32f;
  float cavity = 0.02f;
  float lip_threshold = 0.46f;     // pixels darker than this belong to the mouth
  float cavity_threshold = 0.16f;  // pixels darker than this are inside the lips
};

// Locates the dark mouth ellipse in a rendered face frame and returns the
// mesh fitted to it. Frames without mouth pixels report detected = false.
class MouthImageLandmarkDetector final : public LandmarkDetector {
 public:
  explicit MouthImageLandmarkDetector(MouthRendering rendering = {}) : rendering_(rendering) {}

  // Fits a MouthShape in normalized coordinates; false when no mouth pixels are found.
  static bool estimate_shape(const Image& image, const MouthRendering& rendering, MouthShape& shape);

 protected:
  LandmarkSet do_detect(const Frame& frame) override;

 private:
  MouthRendering rendering_;
};

// Replays ground-truth meshes by frame index.
class SyntheticLandmarkDetector final : public LandmarkDetector {
 public:
  explicit SyntheticLandmarkDetector(std::vector<LandmarkSet> truth) : truth_(std::move(truth)) {}

 protected:
  LandmarkSet do_detect(const Frame& frame) override;

 private:
  std::vector<LandmarkSet> truth_;
};

}  // namespace pia::extractors
