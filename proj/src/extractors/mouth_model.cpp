#include "pia/extractors/mouth_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pia/errors.hpp"

namespace pia::extractors {

const std::vector<int>& outer_lip_ring() {
  static const std::vector<int> ring = {61,  185, 40,  39,  37,  0,  267, 269, 270, 409,
                                        291, 375, 321, 405, 314, 17, 84,  181, 91,  146};
  return ring;
}

const std::vector<int>& inner_lip_ring() {
  static const std::vector<int> ring = {78,  191, 80,  81,  82,  13, 312, 311, 310, 415,
                                        308, 324, 318, 402, 317, 14, 87,  178, 88,  95};
  return ring;
}

namespace {

const std::vector<Point2f>& face_template() {
  static const std::vector<Point2f> points = [] {
    std::vector<Point2f> p(kMeshLandmarkCount);
    constexpr double kGolden = 2.399963229728653;
    for (int i = 0; i < kMeshLandmarkCount; ++i) {
      const double r = 0.45 * std::sqrt((i + 0.5) / kMeshLandmarkCount);
      p[i] = {static_cast<float>(0.5 + r * std::cos(i * kGolden)), static_cast<float>(0.5 + r * std::sin(i * kGolden))};
    }
    p[kFaceLeftEdge] = {0.0f, 0.5f};
    p[kFaceRightEdge] = {1.0f, 0.5f};
    return p;
  }();
  return points;
}

void place_ring(std::vector<Point2f>& points, const std::vector<int>& ring, double cx, double cy, double a, double b) {
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const double theta = std::numbers::pi - static_cast<double>(k) * std::numbers::pi / 10.0;
    points[ring[k]] = {static_cast<float>(cx + a * std::cos(theta)), static_cast<float>(cy - b * std::sin(theta))};
  }
}

}  // namespace

LandmarkSet mouth_mesh(const MouthShape& shape) {
  LandmarkSet set;
  set.detected = true;
  set.points = face_template();
  const double a = shape.width / 2.0;
  place_ring(set.points, outer_lip_ring(), shape.cx, shape.cy, a, shape.height / 2.0 + shape.thickness);
  place_ring(set.points, inner_lip_ring(), shape.cx, shape.cy, a, shape.height / 2.0);
  return set;
}

bool MouthImageLandmarkDetector::estimate_shape(const Image& image, const MouthRendering& rendering, MouthShape& shape) {
  const int w = image.width;
  const int h = image.height;
  int x_min = w, x_max = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (image.at(x, y, 0) < rendering.lip_threshold) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
      }
    }
  }
  if (x_max < 0) return false;

  // Pixel edges of the extreme mouth pixels bound the corners.
  const double left = x_min;
  const double right = x_max + 1.0;
  const double cx = 0.5 * (left + right);
  const int column = std::clamp(static_cast<int>(std::floor(cx)), 0, w - 1);

  int top = h, bottom = -1, cav_top = h, cav_bottom = -1;
  for (int y = 0; y < h; ++y) {
    const float v = image.at(column, y, 0);
    if (v < rendering.lip_threshold) {
      top = std::min(top, y);
      bottom = std::max(bottom, y);
    }
    if (v < rendering.cavity_threshold) {
      cav_top = std::min(cav_top, y);
      cav_bottom = std::max(cav_bottom, y);
    }
  }
  if (bottom < 0) return false;

  const double outer_half = 0.5 * (bottom + 1.0 - top);
  const double cy = 0.5 * (top + bottom + 1.0);
  const double inner_half = cav_bottom >= 0 ? 0.5 * (cav_bottom + 1.0 - cav_top) : 0.0;

  shape.cx = cx / w;
  shape.cy = cy / h;
  shape.width = (right - left) / w;
  shape.height = 2.0 * inner_half / h;
  shape.thickness = std::max(0.0, outer_half - inner_half) / h;
  return true;
}

LandmarkSet MouthImageLandmarkDetector::do_detect(const Frame& frame) {
  MouthShape shape;
  if (!estimate_shape(frame.image, rendering_, shape)) return {};
  return mouth_mesh(shape);
}

LandmarkSet SyntheticLandmarkDetector::do_detect(const Frame& frame) {
  if (frame.index < 0 || frame.index >= static_cast<int>(truth_.size())) {
    throw AdapterError("no planted landmarks for frame " + std::to_string(frame.index));
  }
  return truth_[static_cast<std::size_t>(frame.index)];
}

}  // namespace pia::extractors
