#pragma once

#include <span>
#include <string>
#include <vector>

namespace pia::identity {

inline constexpr double kDefaultSpikeThreshold = 8.0;

// Consecutive-pair drift of an embedding sequence. Entry t describes the pair (t, t+1).
struct DriftSeries {
  std::vector<double> l2;
  std::vector<double> cosine;
  std::vector<bool> mask;            // m_t * m_{t+1}, cleared for zero-norm pairs
  std::vector<int> zero_norm_pairs;  // pairs whose cosine is undefined (ZeroNormWarning)
};

struct DriftStats {
  double mean_l2 = 0.0;
  double max_l2 = 0.0;
  int spike_count = 0;
  int masked_pair_count = 0;  // pairs that survive the mask
};

// Throws InvalidInput for fewer than two embeddings, ragged dimensions or a mask of the wrong length.
DriftSeries drift_series(std::span<const std::vector<float>> embeddings, const std::vector<bool>& mask);

// Statistics over pairs with mask set. Throws EmptySeries when none survive.
DriftStats drift_stats(const DriftSeries& series, double spike_threshold = kDefaultSpikeThreshold);

// CSV with columns pair_index,l2,cosine,masked (masked = 1 when the pair is excluded).
std::string drift_csv(const DriftSeries& series);

}  // namespace pia::identity
