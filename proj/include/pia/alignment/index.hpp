#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pia/types.hpp"

namespace pia::alignment {

inline constexpr int kIndexSchemaVersion = 1;

// One phoneme-group sample in the dataset index (one JSON line).
struct IndexEntry {
  std::string video_id;
  std::string symbol;
  std::vector<int> frame_indices;
  Label label = Label::kReal;
  std::string category = "real";
  std::string split = "train";
  std::string cache;               // cache file, relative to the index directory
  std::vector<int> crop_offsets;   // positions of the group's crops inside the cache

  bool operator==(const IndexEntry&) const = default;
};

std::string index_line(const IndexEntry& entry);
// Throws InvalidDataset on malformed lines.
IndexEntry parse_index_line(const std::string& line);

void write_index(const std::string& path, const std::vector<IndexEntry>& entries);
std::vector<IndexEntry> read_index(const std::string& path);

struct VideoRef {
  std::string id;
  Label label = Label::kReal;
  std::string category = "real";
};

// Stratified train/test assignment: within each label the videos are shuffled
// with the seed and the first round(train_fraction * n) go to "train". Returns
// one split name per input video, in input order.
std::vector<std::string> stratified_split(const std::vector<VideoRef>& videos, double train_fraction,
                                          std::uint64_t seed);

// Leave-one-category-out: videos of the held-out fake category form the test
// set together with the reals assigned to "test" by stratified_split; the other
// fake categories are train.
std::vector<std::string> leave_category_out_split(const std::vector<VideoRef>& videos, const std::string& held_out,
                                                  double train_fraction, std::uint64_t seed);

}  // namespace pia::alignment
