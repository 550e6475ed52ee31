#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pia/types.hpp"

namespace pia::geometry {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr double kDefaultClosureTau = 0.5;

struct LipGeometry {
  double lip_height = 0.0;
  double lip_width = 0.0;
  double aspect_ratio = 0.0;
  double closure_score = 0.0;

  GeometryVector to_vector() const;
};

// The 27 lip-related face-mesh landmarks. Order of all() is outer contour
// followed by inner contour; cached lip landmarks use that order.
struct LipLandmarkIndexSet {
  std::vector<int> outer;
  std::vector<int> inner;
  std::pair<int, int> height_pair;  // upper / lower central
  std::pair<int, int> width_pair;   // left / right corner

  std::vector<int> all() const;
  // Position of a mesh index inside all(); throws InvalidConfig if absent.
  int position_of(int mesh_index) const;
  // Throws InvalidConfig unless there are 27 distinct in-range indices and both pairs are members.
  void validate() const;

  static LipLandmarkIndexSet standard();
  static LipLandmarkIndexSet from_json_file(const std::string& path);
};

double mouth_aspect_ratio(double lip_height, double lip_width, double epsilon = kDefaultEpsilon);
double closure_score(double aspect_ratio, double tau = kDefaultClosureTau);

// Throws NoFaceError when the landmarks were not detected.
LipGeometry compute_geometry(const LandmarkSet& landmarks, const LipLandmarkIndexSet& indices,
                             double epsilon = kDefaultEpsilon);

// Same computation from the lip subset alone (points in indices.all() order).
LipGeometry compute_geometry_from_lips(std::span<const Point2f> lip_points, const LipLandmarkIndexSet& indices,
                                       double epsilon = kDefaultEpsilon);

std::vector<Point2f> extract_lip_points(const LandmarkSet& landmarks, const LipLandmarkIndexSet& indices);

struct GeometryRow {
  GeometryVector values{};
  bool valid = false;
};

// Per-frame descriptors; frames without a face yield zeros with valid = false.
std::vector<GeometryRow> geometry_series(const std::vector<FrameRecord>& frames, const LipLandmarkIndexSet& indices);

// CSV with columns frame_index,phoneme,height,width,MAR,closure.
std::string geometry_csv(const std::vector<FrameRecord>& frames, const std::vector<GeometryRow>& rows);

}  // namespace pia::geometry
