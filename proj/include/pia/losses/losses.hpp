#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pia/errors.hpp"

namespace pia::losses {

inline constexpr double kDefaultSmoothing = 0.1;
inline constexpr double kDefaultLambda = 0.1;
inline constexpr double kArcfaceEpsilon = 1e-8;

struct LossBreakdown {
  double ce = 0.0;
  double arcface = 0.0;
  double total = 0.0;
  double lambda = kDefaultLambda;
};

// Two-class cross-entropy against the target (1 - s) on the true class and s
// on the other one. When grad is non-null it receives dL/dlogits.
template <typename Scalar>
Scalar cross_entropy_smoothed(std::span<const Scalar> logits, int label, double smoothing = kDefaultSmoothing,
                              std::array<Scalar, 2>* grad = nullptr) {
  if (logits.size() != 2) throw InvalidInput("cross entropy expects two logits");
  if (label != 0 && label != 1) throw InvalidInput("label must be 0 or 1");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw InvalidInput("smoothing must be in [0, 1)");
  if (!std::isfinite(logits[0]) || !std::isfinite(logits[1])) throw NumericalError("non-finite logits");

  const Scalar m = std::max(logits[0], logits[1]);
  const Scalar lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  const Scalar log_p[2] = {logits[0] - lse, logits[1] - lse};
  Scalar target[2];
  target[label] = static_cast<Scalar>(1.0 - smoothing);
  target[1 - label] = static_cast<Scalar>(smoothing);
  const Scalar loss = -(target[0] * log_p[0] + target[1] * log_p[1]);
  if (grad != nullptr) {
    (*grad)[0] = std::exp(log_p[0]) - target[0];
    (*grad)[1] = std::exp(log_p[1]) - target[1];
  }
  return loss;
}

// Masked temporal identity consistency:
//   sum_t (1 - cos(a_t, a_{t+1})) m_t m_{t+1} / (sum_t m_t m_{t+1} + eps).
// Zero-norm embeddings contribute a cosine of 0. When grad is non-null it is
// resized to match embeddings and receives dL/da_t.
double arcface_consistency(std::span<const std::vector<double>> embeddings, const std::vector<bool>& mask,
                           double epsilon = kArcfaceEpsilon, std::vector<std::vector<double>>* grad = nullptr);

// Float convenience overload for cached embeddings.
double arcface_consistency(std::span<const std::vector<float>> embeddings, const std::vector<bool>& mask,
                           double epsilon = kArcfaceEpsilon);

inline double total_loss(double ce, double arcface, double lambda = kDefaultLambda) { return ce + lambda * arcface; }

inline LossBreakdown make_breakdown(double ce, double arcface, double lambda = kDefaultLambda) {
  return {ce, arcface, total_loss(ce, arcface, lambda), lambda};
}

// One JSON-lines record: {"arcface":..,"ce":..,"step":..,"total":..}.
std::string breakdown_json_line(long step, const LossBreakdown& loss);

}  // namespace pia::losses
