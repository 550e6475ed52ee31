#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pia/types.hpp"

namespace pia::extractors {

inline constexpr const char* kCacheMagic = "PIA1";
inline constexpr std::uint32_t kCacheFormatVersion = 1;

// Everything extracted for one video. Crops are stored only for the frames
// listed (typically the frames referenced by sampled phoneme groups).
struct VideoCache {
  VideoManifest manifest;
  std::vector<FrameRecord> frames;
  std::vector<VisemeCrop> crops;
};

// Writes the cache file and returns its path (the cache handle).
// Throws InvalidInput when frame and manifest counts disagree.
std::string write_cache(const std::string& path, const VideoManifest& manifest, const std::vector<FrameRecord>& frames,
                        const std::vector<VisemeCrop>& crops);

// Throws CacheError on version mismatch, bad magic or truncation.
VideoCache read_cache(const std::string& path, std::uint32_t expected_version = kCacheFormatVersion);

}  // namespace pia::extractors
