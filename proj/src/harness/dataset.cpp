#include "pia/harness/dataset.hpp"

#include <filesystem>
#include <map>

#include "pia/alignment/alignment.hpp"
#include "pia/alignment/index.hpp"
#include "pia/errors.hpp"
#include "pia/extractors/cache.hpp"

namespace pia::harness {

std::size_t Dataset::count(Label label) const {
  std::size_t n = 0;
  for (const auto& v : videos) n += v.label == label ? 1 : 0;
  return n;
}

Dataset load_dataset(const std::string& index_path, const std::string& split) {
  const auto entries = alignment::read_index(index_path);
  const auto base = std::filesystem::path(index_path).parent_path();

  std::vector<std::string> order;
  std::map<std::string, std::vector<const alignment::IndexEntry*>> by_video;
  for (const auto& e : entries) {
    if (!split.empty() && e.split != split) continue;
    auto [it, inserted] = by_video.try_emplace(e.video_id);
    if (inserted) order.push_back(e.video_id);
    it->second.push_back(&e);
  }

  Dataset dataset;
  for (const auto& id : order) {
    const auto& group_entries = by_video.at(id);
    const auto& first = *group_entries.front();
    for (const auto* e : group_entries) {
      if (e->label != first.label || e->category != first.category || e->cache != first.cache) {
        throw InvalidDataset("index lines of video " + id + " disagree on label, category or cache");
      }
    }
    extractors::VideoCache cache;
    try {
      cache = extractors::read_cache((base / first.cache).string());
    } catch (const CacheError& e) {
      throw InvalidDataset("video " + id + ": " + e.what());
    }

    model::VideoInput video;
    video.id = id;
    video.label = first.label;
    video.category = first.category;
    for (const auto* e : group_entries) {
      model::GroupInput g;
      const auto symbol = alignment::PhonemeVocabulary::index_of(e->symbol);
      if (!symbol) throw InvalidDataset("video " + id + " has non-vocabulary symbol " + e->symbol);
      g.symbol = *symbol;
      for (std::size_t k = 0; k < e->frame_indices.size(); ++k) {
        const int f = e->frame_indices[k];
        const int offset = e->crop_offsets[k];
        if (f < 0 || f >= static_cast<int>(cache.frames.size())) throw InvalidDataset("frame index out of range");
        if (offset < 0 || offset >= static_cast<int>(cache.crops.size())) throw InvalidDataset("crop offset out of range");
        const auto& record = cache.frames[static_cast<std::size_t>(f)];
        g.crops.push_back(cache.crops[static_cast<std::size_t>(offset)].pixels);
        g.geometry.push_back(record.geometry);
        const bool has_identity = record.identity.has_value();
        g.identities.push_back(has_identity ? *record.identity : std::vector<float>(kIdentityDim, 0.0f));
        g.valid = g.valid && record.valid && has_identity;
        video.frame_embeddings.push_back(g.identities.back());
        video.frame_mask.push_back(record.valid && has_identity);
      }
      video.groups.push_back(std::move(g));
    }
    dataset.videos.push_back(std::move(video));
  }
  return dataset;
}

void require_both_classes(const Dataset& dataset, const std::string& what) {
  if (dataset.videos.empty()) throw InvalidDataset(what + " is empty");
  if (dataset.count(Label::kReal) == 0 || dataset.count(Label::kFake) == 0) {
    throw InvalidDataset(what + " must contain both real and fake videos");
  }
}

}  // namespace pia::harness
