#include "pia/alignment/index.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pia/errors.hpp"
#include "pia/util/random.hpp"

namespace pia::alignment {

std::string index_line(const IndexEntry& e) {
  nlohmann::ordered_json j;
  j["schema"] = kIndexSchemaVersion;
  j["video_id"] = e.video_id;
  j["symbol"] = e.symbol;
  j["frame_indices"] = e.frame_indices;
  j["label"] = to_string(e.label);
  j["category"] = e.category;
  j["split"] = e.split;
  j["cache"] = e.cache;
  j["crop_offsets"] = e.crop_offsets;
  return j.dump();
}

IndexEntry parse_index_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    if (j.at("schema").get<int>() != kIndexSchemaVersion) throw InvalidDataset("unsupported index schema version");
    IndexEntry e;
    e.video_id = j.at("video_id").get<std::string>();
    e.symbol = j.at("symbol").get<std::string>();
    e.frame_indices = j.at("frame_indices").get<std::vector<int>>();
    e.label = label_from_string(j.at("label").get<std::string>());
    e.category = j.at("category").get<std::string>();
    e.split = j.at("split").get<std::string>();
    e.cache = j.at("cache").get<std::string>();
    e.crop_offsets = j.at("crop_offsets").get<std::vector<int>>();
    if (e.crop_offsets.size() != e.frame_indices.size()) throw InvalidDataset("crop offsets do not match frames");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidDataset(std::string("malformed index line: ") + ex.what());
  } catch (const InvalidInput& ex) {
    throw InvalidDataset(ex.what());
  }
}

void write_index(const std::string& path, const std::vector<IndexEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidDataset("cannot write index " + path);
  for (const auto& e : entries) out << index_line(e) << '\n';
}

std::vector<IndexEntry> read_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDataset("cannot open index " + path);
  std::vector<IndexEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) entries.push_back(parse_index_line(line));
  }
  return entries;
}

std::vector<std::string> stratified_split(const std::vector<VideoRef>& videos, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) throw InvalidConfig("train fraction must be in [0, 1]");
  std::vector<std::string> split(videos.size(), "test");
  for (const Label label : {Label::kReal, Label::kFake}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < videos.size(); ++i) {
      if (videos[i].label == label) members.push_back(i);
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < n_train; ++k) split[members[k]] = "train";
  }
  return split;
}

std::vector<std::string> leave_category_out_split(const std::vector<VideoRef>& videos, const std::string& held_out,
                                                  double train_fraction, std::uint64_t seed) {
  bool found = false;
  for (const auto& v : videos) found = found || (v.label == Label::kFake && v.category == held_out);
  if (!found) throw InvalidConfig("no fake videos in category '" + held_out + "'");
  auto split = stratified_split(videos, train_fraction, seed);
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (videos[i].label == Label::kFake) split[i] = videos[i].category == held_out ? "test" : "train";
  }
  return split;
}

}  // namespace pia::alignment
