#include "pia/identity/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pia/errors.hpp"

namespace pia::identity {

DriftSeries drift_series(std::span<const std::vector<float>> embeddings, const std::vector<bool>& mask) {
  if (embeddings.size() < 2) throw InvalidInput("drift needs at least two embeddings");
  if (mask.size() != embeddings.size()) throw InvalidInput("mask length must equal embedding count");
  const std::size_t dim = embeddings.front().size();
  for (const auto& e : embeddings) {
    if (e.size() != dim) throw InvalidInput("embeddings have inconsistent dimensions");
  }

  DriftSeries series;
  const std::size_t pairs = embeddings.size() - 1;
  series.l2.resize(pairs);
  series.cosine.resize(pairs);
  series.mask.resize(pairs);
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto& a = embeddings[t];
    const auto& b = embeddings[t + 1];
    double dot = 0.0, na = 0.0, nb = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double x = a[i];
      const double y = b[i];
      dot += x * y;
      na += x * x;
      nb += y * y;
      diff += (x - y) * (x - y);
    }
    series.l2[t] = std::sqrt(diff);
    bool pair_ok = mask[t] && mask[t + 1];
    if (na == 0.0 || nb == 0.0) {
      series.cosine[t] = 0.0;
      series.zero_norm_pairs.push_back(static_cast<int>(t));
      pair_ok = false;
    } else {
      series.cosine[t] = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    }
    series.mask[t] = pair_ok;
  }
  return series;
}

DriftStats drift_stats(const DriftSeries& series, double spike_threshold) {
  DriftStats stats;
  double sum = 0.0;
  for (std::size_t t = 0; t < series.l2.size(); ++t) {
    if (!series.mask[t]) continue;
    const double v = series.l2[t];
    ++stats.masked_pair_count;
    sum += v;
    stats.max_l2 = std::max(stats.max_l2, v);
    if (v > spike_threshold) ++stats.spike_count;
  }
  if (stats.masked_pair_count == 0) throw EmptySeries("no unmasked embedding pairs");
  stats.mean_l2 = sum / stats.masked_pair_count;
  return stats;
}

std::string drift_csv(const DriftSeries& series) {
  std::ostringstream out;
  out.precision(9);
  out << "pair_index,l2,cosine,masked\n";
  for (std::size_t t = 0; t < series.l2.size(); ++t) {
    out << t << ',' << series.l2[t] << ',' << series.cosine[t] << ',' << (series.mask[t] ? 0 : 1) << '\n';
  }
  return out.str();
}

}  // namespace pia::identity
