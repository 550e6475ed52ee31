#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pia::extractors {

// Named little-endian float32 payload.
struct Blob {
  std::string name;
  std::vector<float> data;

  bool operator==(const Blob&) const = default;
};

// On-disk layout shared by feature caches and model checkpoints:
//   magic[4] | u32 version | u64 metadata length | UTF-8 JSON metadata |
//   repeated { u32 name length | name bytes | u64 byte length | float32 data }
struct Container {
  std::string magic;  // exactly four ASCII bytes
  std::uint32_t version = 0;
  nlohmann::json metadata;
  std::vector<Blob> blobs;

  const Blob& blob(const std::string& name) const;  // throws CacheError when missing
  bool has_blob(const std::string& name) const;
};

std::vector<char> serialize_container(const Container& container);
void write_container(const std::string& path, const Container& container);

// Throws CacheError on bad magic, version mismatch or truncation.
Container parse_container(const std::vector<char>& bytes, const std::string& expected_magic,
                          std::uint32_t expected_version);
Container read_container(const std::string& path, const std::string& expected_magic, std::uint32_t expected_version);

}  // namespace pia::extractors
