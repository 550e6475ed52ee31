#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace pia::harness {

struct TrainConfig {
  std::string optimizer = "adam";
  double learning_rate = 3e-4;
  double weight_decay = 1e-5;
  int epochs = 25;
  int batch_size = 16;
  double lambda = 0.1;
  int heads = 4;
  std::uint64_t seed = 0;
  double label_smoothing = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws InvalidConfig.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  // Overlays the keys present in j; unknown keys throw InvalidConfig.
  void apply_json(const nlohmann::json& j);
  static bool is_key(const std::string& key);
};

}  // namespace pia::harness
