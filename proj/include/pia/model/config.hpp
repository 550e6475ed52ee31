#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pia::model {

struct ModelConfig {
  std::string architecture = "pia";  // pia | plain_cnn
  int d = 128;                       // per-stream embedding size
  int heads = 4;
  int key_dim = 32;
  int geometry_hidden = 64;
  int identity_hidden = 128;
  int head_hidden = 64;
  int conv3d_channels = 8;
  std::vector<int> backbone_channels = {16, 32, 32};  // stride-2 3x3 conv blocks
  std::string backbone = "trainable";                 // trainable | frozen
  std::string backbone_weights;                       // optional checkpoint supplying backbone weights
  bool use_geometry = true;
  bool use_visual = true;
  bool use_identity = true;
  bool use_phoneme = false;
  int num_classes = 2;
  int group_size = 5;
  double output_init_scale = 0.01;  // final layer starts near zero so p(fake) starts near 0.5

  // Throws InvalidConfig.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  // Missing keys keep their defaults; unknown keys throw InvalidConfig.
  static ModelConfig from_json(const nlohmann::json& j);
};

}  // namespace pia::model
