#include "pia/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pia/errors.hpp"

namespace pia::geometry {

namespace {

double distance(const Point2f& a, const Point2f& b) {
  const double dx = static_cast<double>(a.x) - static_cast<double>(b.x);
  const double dy = static_cast<double>(a.y) - static_cast<double>(b.y);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

GeometryVector LipGeometry::to_vector() const {
  return {static_cast<float>(lip_height), static_cast<float>(lip_width), static_cast<float>(aspect_ratio),
          static_cast<float>(closure_score)};
}

std::vector<int> LipLandmarkIndexSet::all() const {
  std::vector<int> out(outer);
  out.insert(out.end(), inner.begin(), inner.end());
  return out;
}

int LipLandmarkIndexSet::position_of(int mesh_index) const {
  const auto indices = all();
  const auto it = std::find(indices.begin(), indices.end(), mesh_index);
  if (it == indices.end()) throw InvalidConfig("landmark " + std::to_string(mesh_index) + " is not in the lip set");
  return static_cast<int>(it - indices.begin());
}

void LipLandmarkIndexSet::validate() const {
  const auto indices = all();
  if (indices.size() != 27) {
    throw InvalidConfig("lip landmark set must have 27 indices, got " + std::to_string(indices.size()));
  }
  std::set<int> unique(indices.begin(), indices.end());
  if (unique.size() != indices.size()) throw InvalidConfig("lip landmark indices must be distinct");
  for (int i : indices) {
    if (i < 0 || i >= kMeshLandmarkCount) throw InvalidConfig("lip landmark index out of range");
  }
  for (int i : {height_pair.first, height_pair.second, width_pair.first, width_pair.second}) {
    if (!unique.contains(i)) throw InvalidConfig("height/width pair landmark " + std::to_string(i) + " not in set");
  }
}

LipLandmarkIndexSet LipLandmarkIndexSet::standard() {
  LipLandmarkIndexSet set;
  // Full outer lip contour, clockwise from the left corner over the upper lip.
  set.outer = {61, 185, 40, 39, 37, 0, 267, 269, 270, 409, 291, 375, 321, 405, 314, 17, 84, 181, 91, 146};
  // Inner contour: corners, upper arc and lower arc around the central pair.
  set.inner = {78, 82, 13, 312, 308, 317, 14};
  set.height_pair = {13, 14};
  set.width_pair = {61, 291};
  return set;
}

LipLandmarkIndexSet LipLandmarkIndexSet::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open lip index config " + path);
  nlohmann::json j;
  try {
    in >> j;
    LipLandmarkIndexSet set;
    set.outer = j.at("outer").get<std::vector<int>>();
    set.inner = j.at("inner").get<std::vector<int>>();
    const auto h = j.at("height_pair").get<std::vector<int>>();
    const auto w = j.at("width_pair").get<std::vector<int>>();
    if (h.size() != 2 || w.size() != 2) throw InvalidConfig("pairs must have two entries");
    set.height_pair = {h[0], h[1]};
    set.width_pair = {w[0], w[1]};
    set.validate();
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("bad lip index config: ") + e.what());
  }
}

double mouth_aspect_ratio(double lip_height, double lip_width, double epsilon) {
  return lip_height / (lip_width + epsilon);
}

double closure_score(double aspect_ratio, double tau) { return std::clamp(1.0 - aspect_ratio / tau, 0.0, 1.0); }

std::vector<Point2f> extract_lip_points(const LandmarkSet& landmarks, const LipLandmarkIndexSet& indices) {
  if (!landmarks.detected) throw NoFaceError("landmarks not detected");
  if (landmarks.points.size() != static_cast<std::size_t>(kMeshLandmarkCount)) {
    throw InvalidInput("expected 468 landmarks, got " + std::to_string(landmarks.points.size()));
  }
  std::vector<Point2f> lips;
  for (int i : indices.all()) lips.push_back(landmarks.points[static_cast<std::size_t>(i)]);
  return lips;
}

LipGeometry compute_geometry_from_lips(std::span<const Point2f> lip_points, const LipLandmarkIndexSet& indices,
                                       double epsilon) {
  if (lip_points.size() != indices.all().size()) throw InvalidInput("lip point count does not match index set");
  const auto at = [&](int mesh_index) { return lip_points[static_cast<std::size_t>(indices.position_of(mesh_index))]; };

  LipGeometry g;
  g.lip_height = distance(at(indices.height_pair.first), at(indices.height_pair.second));
  g.lip_width = distance(at(indices.width_pair.first), at(indices.width_pair.second));
  g.aspect_ratio = mouth_aspect_ratio(g.lip_height, g.lip_width, epsilon);
  g.closure_score = closure_score(g.aspect_ratio);
  return g;
}

LipGeometry compute_geometry(const LandmarkSet& landmarks, const LipLandmarkIndexSet& indices, double epsilon) {
  const auto lips = extract_lip_points(landmarks, indices);
  return compute_geometry_from_lips(lips, indices, epsilon);
}

std::vector<GeometryRow> geometry_series(const std::vector<FrameRecord>& frames, const LipLandmarkIndexSet& indices) {
  std::vector<GeometryRow> rows;
  rows.reserve(frames.size());
  for (const auto& frame : frames) {
    GeometryRow row;
    if (frame.face_detected && !frame.lip_landmarks.empty()) {
      row.values = compute_geometry_from_lips(frame.lip_landmarks, indices).to_vector();
      row.valid = true;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string geometry_csv(const std::vector<FrameRecord>& frames, const std::vector<GeometryRow>& rows) {
  std::ostringstream out;
  out.precision(9);
  out << "frame_index,phoneme,height,width,MAR,closure\n";
  for (std::size_t i = 0; i < frames.size() && i < rows.size(); ++i) {
    const auto& v = rows[i].values;
    out << frames[i].frame_index << ',' << frames[i].phoneme << ',' << v[0] << ',' << v[1] << ',' << v[2] << ','
        << v[3] << '\n';
  }
  return out.str();
}

}  // namespace pia::geometry
