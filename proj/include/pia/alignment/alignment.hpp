#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pia/types.hpp"

namespace pia::alignment {

// The 14 visually distinct phonemes kept for training, in stable index order:
// bilabials, labiodentals, alveolars, velar, approximants, vowels, postalveolar.
class PhonemeVocabulary {
 public:
  static constexpr std::size_t kSize = 14;
  static constexpr std::array<std::string_view, kSize> kSymbols = {
      "p", "b", "m", "f", "v", "t", "s", "k", "w", "ɹ", "i", "æ", "o", "ʃ"};

  static std::optional<int> index_of(std::string_view symbol);
  static bool contains(std::string_view symbol) { return index_of(symbol).has_value(); }
  static std::string_view symbol(int index);
};

struct FrameLabel {
  int frame_index = 0;
  std::string symbol;

  bool operator==(const FrameLabel&) const = default;
};

// Assigns each frame the symbol of the interval containing frame_index / fps
// (half-open intervals); frames outside every interval get kSilence.
// Throws InvalidInput for overlapping, unordered or empty intervals.
std::vector<FrameLabel> label_frames(const std::vector<PhonemeInterval>& intervals, double fps, int frame_count);

// Keeps only frames whose symbol is in the vocabulary.
std::vector<FrameLabel> filter_vocabulary(const std::vector<FrameLabel>& labels);

struct GroupSkeleton {
  std::string symbol;
  std::vector<int> frame_indices;  // ascending, exactly k entries

  bool operator==(const GroupSkeleton&) const = default;
};

// One group per maximal run of consecutive frame indices sharing a symbol.
// Runs of length >= k get k indices spread uniformly over the run (exact
// rational positions, ties rounded half to even); shorter runs are padded by
// repeating their last index.
std::vector<GroupSkeleton> sample_groups(const std::vector<FrameLabel>& labels, int k = 5);

// Round-half-to-even of numerator / denominator for non-negative integers.
long long round_half_even_ratio(long long numerator, long long denominator);

}  // namespace pia::alignment
