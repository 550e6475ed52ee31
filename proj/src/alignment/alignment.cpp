#include "pia/alignment/alignment.hpp"

#include <algorithm>

#include "pia/errors.hpp"

namespace pia::alignment {

std::optional<int> PhonemeVocabulary::index_of(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i) {
    if (kSymbols[i] == symbol) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string_view PhonemeVocabulary::symbol(int index) {
  if (index < 0 || index >= static_cast<int>(kSize)) {
    throw InvalidInput("vocabulary index out of range: " + std::to_string(index));
  }
  return kSymbols[static_cast<std::size_t>(index)];
}

std::vector<FrameLabel> label_frames(const std::vector<PhonemeInterval>& intervals, double fps, int frame_count) {
  if (!(fps > 0.0)) throw InvalidInput("fps must be positive");
  if (frame_count < 0) throw InvalidInput("negative frame count");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (iv.symbol.empty()) throw InvalidInput("empty phoneme symbol");
    if (!(iv.start < iv.end)) throw InvalidInput("phoneme interval with end <= start: " + iv.symbol);
    if (i > 0 && iv.start < intervals[i - 1].end) {
      throw InvalidInput("overlapping or unordered phoneme intervals at index " + std::to_string(i));
    }
  }

  std::vector<FrameLabel> labels;
  labels.reserve(static_cast<std::size_t>(frame_count));
  for (int f = 0; f < frame_count; ++f) {
    const double t = static_cast<double>(f) / fps;
    // First interval whose end is strictly after t; it contains t iff start <= t.
    auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                               [](double time, const PhonemeInterval& iv) { return time < iv.end; });
    if (it != intervals.end() && it->start <= t) {
      labels.push_back({f, it->symbol});
    } else {
      labels.push_back({f, kSilence});
    }
  }
  return labels;
}

std::vector<FrameLabel> filter_vocabulary(const std::vector<FrameLabel>& labels) {
  std::vector<FrameLabel> kept;
  std::copy_if(labels.begin(), labels.end(), std::back_inserter(kept),
               [](const FrameLabel& l) { return PhonemeVocabulary::contains(l.symbol); });
  return kept;
}

long long round_half_even_ratio(long long numerator, long long denominator) {
  const long long q = numerator / denominator;
  const long long r = numerator % denominator;
  const long long twice = 2 * r;
  if (twice > denominator) return q + 1;
  if (twice < denominator) return q;
  return (q % 2 == 0) ? q : q + 1;
}

std::vector<GroupSkeleton> sample_groups(const std::vector<FrameLabel>& labels, int k) {
  if (k < 1) throw InvalidInput("group size must be >= 1");
  std::vector<GroupSkeleton> groups;
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1].symbol == labels[i].symbol &&
           labels[j + 1].frame_index == labels[j].frame_index + 1) {
      ++j;
    }
    const int first = labels[i].frame_index;
    const int last = labels[j].frame_index;
    const int length = last - first + 1;

    GroupSkeleton group;
    group.symbol = labels[i].symbol;
    group.frame_indices.reserve(static_cast<std::size_t>(k));
    if (length >= k) {
      for (int s = 0; s < k; ++s) {
        const long long offset = (k == 1) ? 0 : round_half_even_ratio(static_cast<long long>(s) * (length - 1), k - 1);
        group.frame_indices.push_back(first + static_cast<int>(offset));
      }
    } else {
      for (int f = first; f <= last; ++f) group.frame_indices.push_back(f);
      while (static_cast<int>(group.frame_indices.size()) < k) group.frame_indices.push_back(last);
    }
    groups.push_back(std::move(group));
    i = j + 1;
  }
  return groups;
}

}  // namespace pia::alignment
