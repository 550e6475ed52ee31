#include "pia/extractors/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pia/errors.hpp"
#include "pia/extractors/adapters.hpp"

namespace pia::extractors {

namespace fs = std::filesystem;

namespace {

int read_header_int(std::istream& in) {
  int c = in.peek();
  while (c == '#' || std::isspace(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else {
      in.get();
    }
    c = in.peek();
  }
  int value = -1;
  in >> value;
  return value;
}

}  // namespace

Image read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open frame " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P6" && magic != "P5") throw DecodeError(path + " is not a binary PPM/PGM");
  Image image;
  image.width = read_header_int(in);
  image.height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (image.width <= 0 || image.height <= 0 || maxval != 255) throw DecodeError(path + ": unsupported PNM header");
  in.get();
  image.channels = magic == "P6" ? 3 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.width) * image.height * image.channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw DecodeError(path + ": truncated pixel data");
  image.pixels.resize(raw.size());
  std::transform(raw.begin(), raw.end(), image.pixels.begin(), [](unsigned char v) { return v / 255.0f; });
  return image;
}

std::vector<Frame> load_frame_directory(const std::string& directory) {
  if (!fs::is_directory(directory)) throw InvalidInput("frame directory " + directory + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) frames.push_back({static_cast<int>(i), read_pnm(files[i].string())});
  return frames;
}

DecodedVideo decode_video(const std::string& video_path, const std::string& work_dir) {
  if (!fs::exists(video_path)) throw DecodeError("video " + video_path + " does not exist");
  const fs::path frames_dir = fs::path(work_dir) / "frames";
  fs::create_directories(frames_dir);
  DecodedVideo out;
  out.audio_path = (fs::path(work_dir) / "audio.wav").string();
  const std::string frames_cmd = "ffmpeg -nostdin -loglevel error -y -i '" + video_path + "' -vsync 0 '" +
                                 (frames_dir / "frame_%06d.ppm").string() + "' >/dev/null 2>&1";
  const std::string audio_cmd = "ffmpeg -nostdin -loglevel error -y -i '" + video_path + "' -vn -ac 1 -ar 16000 '" +
                                out.audio_path + "' >/dev/null 2>&1";
  if (std::system(frames_cmd.c_str()) != 0 || std::system(audio_cmd.c_str()) != 0) {
    throw DecodeError("ffmpeg could not decode " + video_path);
  }
  out.frames = load_frame_directory(frames_dir.string());
  return out;
}

VisemeCrop crop_mouth(const Frame& frame, const LandmarkSet& landmarks, const geometry::LipLandmarkIndexSet& lips,
                      const CropConfig& config) {
  validate_frame(frame);
  const Image& im = frame.image;
  double cx, cy, side;
  if (landmarks.detected) {
    const auto& p = landmarks.points;
    const auto& l = p.at(lips.width_pair.first);
    const auto& r = p.at(lips.width_pair.second);
    cx = 0.5 * (static_cast<double>(l.x) + r.x) * im.width;
    cy = 0.5 * (static_cast<double>(l.y) + r.y) * im.height;
    const auto& fl = p.at(config.face_left);
    const auto& fr = p.at(config.face_right);
    const double dx = (static_cast<double>(fr.x) - fl.x) * im.width;
    const double dy = (static_cast<double>(fr.y) - fl.y) * im.height;
    side = config.face_ratio * std::sqrt(dx * dx + dy * dy);
  } else {
    cx = 0.5 * im.width;
    cy = 0.5 * im.height;
    side = std::min(im.width, im.height);
  }
  if (!(side > 0.0)) side = std::min(im.width, im.height);

  VisemeCrop crop;
  crop.frame_index = frame.index;
  crop.pixels.resize(static_cast<std::size_t>(kCropSize) * kCropSize * kCropChannels);
  const double x0 = cx - 0.5 * side;
  const double y0 = cy - 0.5 * side;
  const double step = side / kCropSize;
  const auto sample = [&](int x, int y, int c) {
    x = std::clamp(x, 0, im.width - 1);
    y = std::clamp(y, 0, im.height - 1);
    return static_cast<double>(im.at(x, y, std::min(c, im.channels - 1)));
  };
  for (int oy = 0; oy < kCropSize; ++oy) {
    const double sy = y0 + (oy + 0.5) * step - 0.5;
    const int y = static_cast<int>(std::floor(sy));
    const double fy = sy - y;
    for (int ox = 0; ox < kCropSize; ++ox) {
      const double sx = x0 + (ox + 0.5) * step - 0.5;
      const int x = static_cast<int>(std::floor(sx));
      const double fx = sx - x;
      for (int c = 0; c < kCropChannels; ++c) {
        const double v = (1 - fy) * ((1 - fx) * sample(x, y, c) + fx * sample(x + 1, y, c)) +
                         fy * ((1 - fx) * sample(x, y + 1, c) + fx * sample(x + 1, y + 1, c));
        crop.pixels[(static_cast<std::size_t>(oy) * kCropSize + ox) * kCropChannels + c] =
            (static_cast<float>(v) - config.mean) / config.stddev;
      }
    }
  }
  return crop;
}

}  // namespace pia::extractors
