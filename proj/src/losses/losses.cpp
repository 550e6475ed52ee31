#include "pia/losses/losses.hpp"

#include <json.hpp>

namespace pia::losses {

double arcface_consistency(std::span<const std::vector<double>> embeddings, const std::vector<bool>& mask,
                           double epsilon, std::vector<std::vector<double>>* grad) {
  if (mask.size() != embeddings.size()) throw InvalidInput("mask length must equal embedding count");
  const std::size_t count = embeddings.size();
  if (grad != nullptr) {
    grad->assign(count, {});
    for (std::size_t t = 0; t < count; ++t) (*grad)[t].assign(embeddings[t].size(), 0.0);
  }
  if (count < 2) return 0.0;

  double numerator = 0.0;
  double pair_count = 0.0;
  std::vector<double> norms(count);
  for (std::size_t t = 0; t < count; ++t) {
    double s = 0.0;
    for (double v : embeddings[t]) s += v * v;
    norms[t] = std::sqrt(s);
  }
  for (std::size_t t = 0; t + 1 < count; ++t) {
    if (!(mask[t] && mask[t + 1])) continue;
    pair_count += 1.0;
    const auto& a = embeddings[t];
    const auto& b = embeddings[t + 1];
    if (a.size() != b.size()) throw InvalidInput("embeddings have inconsistent dimensions");
    if (norms[t] == 0.0 || norms[t + 1] == 0.0) {
      numerator += 1.0;
      continue;
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    numerator += 1.0 - dot / (norms[t] * norms[t + 1]);
  }
  const double denominator = pair_count + epsilon;
  const double loss = numerator / denominator;

  if (grad != nullptr) {
    // d(1 - cos)/da = -(b / (|a||b|) - cos * a / |a|^2), symmetric for b.
    for (std::size_t t = 0; t + 1 < count; ++t) {
      if (!(mask[t] && mask[t + 1])) continue;
      if (norms[t] == 0.0 || norms[t + 1] == 0.0) continue;
      const auto& a = embeddings[t];
      const auto& b = embeddings[t + 1];
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      const double nanb = norms[t] * norms[t + 1];
      const double cos = dot / nanb;
      auto& ga = (*grad)[t];
      auto& gb = (*grad)[t + 1];
      for (std::size_t i = 0; i < a.size(); ++i) {
        ga[i] -= (b[i] / nanb - cos * a[i] / (norms[t] * norms[t])) / denominator;
        gb[i] -= (a[i] / nanb - cos * b[i] / (norms[t + 1] * norms[t + 1])) / denominator;
      }
    }
  }
  return loss;
}

double arcface_consistency(std::span<const std::vector<float>> embeddings, const std::vector<bool>& mask,
                           double epsilon) {
  std::vector<std::vector<double>> wide;
  wide.reserve(embeddings.size());
  for (const auto& e : embeddings) wide.emplace_back(e.begin(), e.end());
  return arcface_consistency(std::span<const std::vector<double>>(wide), mask, epsilon);
}

std::string breakdown_json_line(long step, const LossBreakdown& loss) {
  nlohmann::json j;
  j["step"] = step;
  j["ce"] = loss.ce;
  j["arcface"] = loss.arcface;
  j["total"] = loss.total;
  return j.dump();
}

}  // namespace pia::losses
