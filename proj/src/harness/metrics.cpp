#include "pia/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pia/errors.hpp"

namespace pia::harness {

namespace {

struct TieGroup {
  long long positives = 0;
  long long negatives = 0;
};

// Groups of equal scores in descending score order.
std::vector<TieGroup> tie_groups(std::span<const double> scores, std::span<const int> labels, long long& positives,
                                 long long& negatives) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  positives = 0;
  negatives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw MetricError("non-finite score");
    if (labels[i] == 1) {
      ++positives;
    } else if (labels[i] == 0) {
      ++negatives;
    } else {
      throw MetricError("labels must be 0 or 1");
    }
  }
  if (positives == 0 || negatives == 0) {
    throw MetricError("metric undefined: the evaluation set contains a single class");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<TieGroup> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || scores[order[k]] != scores[order[k - 1]]) groups.emplace_back();
    (labels[order[k]] == 1 ? groups.back().positives : groups.back().negatives) += 1;
  }
  return groups;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  long long p = 0, n = 0;
  const auto groups = tie_groups(scores, labels, p, n);
  // Twice the trapezoid area in units of one (1/P, 1/N) cell, kept integral.
  long long twice_area = 0;
  long long tp = 0;
  for (const auto& g : groups) {
    twice_area += g.negatives * (2 * tp + g.positives);
    tp += g.positives;
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(p) * static_cast<double>(n));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  long long p = 0, n = 0;
  const auto groups = tie_groups(scores, labels, p, n);
  double ap = 0.0;
  long long tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    if (g.positives == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += static_cast<double>(g.positives) / static_cast<double>(p) * precision;
  }
  return ap;
}

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  if (scores.empty()) throw MetricError("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int predicted = scores[i] >= threshold ? 1 : 0;
    correct += predicted == labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  long long p = 0, n = 0;
  const auto groups = tie_groups(scores, labels, p, n);
  std::vector<RocPoint> curve{{0.0, 0.0}};
  long long tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.positives;
    fp += g.negatives;
    curve.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  }
  return curve;
}

}  // namespace pia::harness
