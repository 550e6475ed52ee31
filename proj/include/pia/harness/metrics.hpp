#pragma once

#include <span>
#include <vector>

namespace pia::harness {

// Labels are 1 for fake (positive) and 0 for real. Scores are p(fake).
// Each metric throws MetricError unless both classes are present.

// Area under the ROC curve by the trapezoidal rule with tied scores grouped
// into one ROC step, so ties count one half. Returned in [0, 1].
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Step-wise area under the precision-recall curve: sum over distinct
// thresholds (descending) of (R_n - R_{n-1}) * P_n.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// Fraction of videos whose prediction (fake when score >= threshold) matches the label.
double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

}  // namespace pia::harness
