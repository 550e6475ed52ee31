#include "pia/extractors/cache.hpp"

#include "pia/errors.hpp"
#include "pia/extractors/container.hpp"

namespace pia::extractors {

namespace {

constexpr std::size_t kCropValues = static_cast<std::size_t>(kCropSize) * kCropSize * kCropChannels;

std::size_t lip_count_of(const std::vector<FrameRecord>& frames) {
  std::size_t count = 0;
  for (const auto& f : frames) {
    if (f.lip_landmarks.empty()) continue;
    if (count != 0 && f.lip_landmarks.size() != count) throw InvalidInput("frames disagree on lip landmark count");
    count = f.lip_landmarks.size();
  }
  return count;
}

}  // namespace

std::string write_cache(const std::string& path, const VideoManifest& manifest, const std::vector<FrameRecord>& frames,
                        const std::vector<VisemeCrop>& crops) {
  if (static_cast<int>(frames.size()) != manifest.frame_count) {
    throw InvalidInput("manifest declares " + std::to_string(manifest.frame_count) + " frames but " +
                       std::to_string(frames.size()) + " were given");
  }
  const std::size_t lip_count = lip_count_of(frames);

  Container c;
  c.magic = kCacheMagic;
  c.version = kCacheFormatVersion;
  c.metadata["manifest"] = {{"id", manifest.id},
                            {"fps", manifest.fps},
                            {"frame_count", manifest.frame_count},
                            {"label", to_string(manifest.label)},
                            {"category", manifest.category}};
  c.metadata["lip_landmark_count"] = lip_count;

  Blob lips{"lip_landmarks", std::vector<float>(frames.size() * lip_count * 2, 0.0f)};
  Blob geometry{"geometry", std::vector<float>(frames.size() * kGeometryFeatures, 0.0f)};
  Blob identity{"identity", std::vector<float>(frames.size() * kIdentityDim, 0.0f)};
  auto frame_meta = nlohmann::json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    frame_meta.push_back({{"index", f.frame_index},
                          {"timestamp", f.timestamp},
                          {"phoneme", f.phoneme},
                          {"face", f.face_detected},
                          {"lips", !f.lip_landmarks.empty()},
                          {"identity", f.identity.has_value()},
                          {"valid", f.valid}});
    for (std::size_t p = 0; p < f.lip_landmarks.size(); ++p) {
      lips.data[(i * lip_count + p) * 2] = f.lip_landmarks[p].x;
      lips.data[(i * lip_count + p) * 2 + 1] = f.lip_landmarks[p].y;
    }
    for (int g = 0; g < kGeometryFeatures; ++g) geometry.data[i * kGeometryFeatures + g] = f.geometry[g];
    if (f.identity) {
      if (f.identity->size() != static_cast<std::size_t>(kIdentityDim)) {
        throw InvalidInput("identity embedding must have 512 components");
      }
      std::copy(f.identity->begin(), f.identity->end(), identity.data.begin() + static_cast<long>(i * kIdentityDim));
    }
  }
  c.metadata["frames"] = std::move(frame_meta);

  Blob crop_blob{"crops", {}};
  crop_blob.data.reserve(crops.size() * kCropValues);
  auto crop_frames = nlohmann::json::array();
  for (const auto& crop : crops) {
    if (crop.pixels.size() != kCropValues) throw InvalidInput("crop must be 112x112x3");
    if (crop.frame_index < 0 || crop.frame_index >= manifest.frame_count) {
      throw InvalidInput("crop refers to a frame outside the video");
    }
    crop_frames.push_back(crop.frame_index);
    crop_blob.data.insert(crop_blob.data.end(), crop.pixels.begin(), crop.pixels.end());
  }
  c.metadata["crop_frames"] = std::move(crop_frames);

  c.blobs = {std::move(lips), std::move(geometry), std::move(identity), std::move(crop_blob)};
  write_container(path, c);
  return path;
}

VideoCache read_cache(const std::string& path, std::uint32_t expected_version) {
  const Container c = read_container(path, kCacheMagic, expected_version);
  VideoCache cache;
  try {
    const auto& m = c.metadata.at("manifest");
    cache.manifest.id = m.at("id").get<std::string>();
    cache.manifest.fps = m.at("fps").get<double>();
    cache.manifest.frame_count = m.at("frame_count").get<int>();
    cache.manifest.label = label_from_string(m.at("label").get<std::string>());
    cache.manifest.category = m.at("category").get<std::string>();

    const auto lip_count = c.metadata.at("lip_landmark_count").get<std::size_t>();
    const auto& frame_meta = c.metadata.at("frames");
    const std::size_t n = frame_meta.size();
    if (static_cast<int>(n) != cache.manifest.frame_count) throw CacheError("frame metadata count mismatch");
    const auto& lips = c.blob("lip_landmarks").data;
    const auto& geometry = c.blob("geometry").data;
    const auto& identity = c.blob("identity").data;
    if (lips.size() != n * lip_count * 2 || geometry.size() != n * kGeometryFeatures ||
        identity.size() != n * kIdentityDim) {
      throw CacheError("blob sizes do not match frame count");
    }
    cache.frames.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& fm = frame_meta[i];
      auto& f = cache.frames[i];
      f.frame_index = fm.at("index").get<int>();
      f.timestamp = fm.at("timestamp").get<double>();
      f.phoneme = fm.at("phoneme").get<std::string>();
      f.face_detected = fm.at("face").get<bool>();
      f.valid = fm.at("valid").get<bool>();
      if (fm.at("lips").get<bool>()) {
        f.lip_landmarks.resize(lip_count);
        for (std::size_t p = 0; p < lip_count; ++p) {
          f.lip_landmarks[p] = {lips[(i * lip_count + p) * 2], lips[(i * lip_count + p) * 2 + 1]};
        }
      }
      for (int g = 0; g < kGeometryFeatures; ++g) f.geometry[g] = geometry[i * kGeometryFeatures + g];
      if (fm.at("identity").get<bool>()) {
        f.identity.emplace(identity.begin() + static_cast<long>(i * kIdentityDim),
                           identity.begin() + static_cast<long>((i + 1) * kIdentityDim));
      }
    }

    const auto crop_frames = c.metadata.at("crop_frames").get<std::vector<int>>();
    const auto& crops = c.blob("crops").data;
    if (crops.size() != crop_frames.size() * kCropValues) throw CacheError("crop blob size mismatch");
    cache.crops.resize(crop_frames.size());
    for (std::size_t k = 0; k < crop_frames.size(); ++k) {
      cache.crops[k].frame_index = crop_frames[k];
      cache.crops[k].pixels.assign(crops.begin() + static_cast<long>(k * kCropValues),
                                   crops.begin() + static_cast<long>((k + 1) * kCropValues));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("malformed cache metadata: ") + e.what());
  } catch (const InvalidInput& e) {
    throw CacheError(e.what());
  }
  return cache;
}

}  // namespace pia::extractors
