#include "pia/model/config.hpp"

#include <set>

#include "pia/errors.hpp"

namespace pia::model {

void ModelConfig::validate() const {
  if (architecture != "pia" && architecture != "plain_cnn") {
    throw InvalidConfig("architecture must be pia or plain_cnn, got '" + architecture + "'");
  }
  if (backbone != "trainable" && backbone != "frozen") {
    throw InvalidConfig("backbone must be trainable or frozen, got '" + backbone + "'");
  }
  if (architecture == "pia" && !use_geometry && !use_visual && !use_identity) {
    throw InvalidConfig("at least one stream must be enabled");
  }
  if (heads < 1) throw InvalidConfig("heads must be >= 1");
  if (num_classes != 2) throw InvalidConfig("only two classes are supported");
  if (group_size < 1) throw InvalidConfig("group_size must be >= 1");
  for (int v : {d, key_dim, geometry_hidden, identity_hidden, head_hidden, conv3d_channels}) {
    if (v < 1) throw InvalidConfig("layer sizes must be positive");
  }
  if (backbone_channels.empty()) throw InvalidConfig("backbone needs at least one block");
  for (int c : backbone_channels) {
    if (c < 1) throw InvalidConfig("backbone channels must be positive");
  }
  if (!(output_init_scale > 0.0)) throw InvalidConfig("output_init_scale must be positive");
}

nlohmann::ordered_json ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["architecture"] = architecture;
  j["d"] = d;
  j["heads"] = heads;
  j["key_dim"] = key_dim;
  j["geometry_hidden"] = geometry_hidden;
  j["identity_hidden"] = identity_hidden;
  j["head_hidden"] = head_hidden;
  j["conv3d_channels"] = conv3d_channels;
  j["backbone_channels"] = backbone_channels;
  j["backbone"] = backbone;
  j["backbone_weights"] = backbone_weights;
  j["use_geometry"] = use_geometry;
  j["use_visual"] = use_visual;
  j["use_identity"] = use_identity;
  j["use_phoneme"] = use_phoneme;
  j["num_classes"] = num_classes;
  j["group_size"] = group_size;
  j["output_init_scale"] = output_init_scale;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("model config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "architecture", "d", "heads", "key_dim", "geometry_hidden", "identity_hidden", "head_hidden",
      "conv3d_channels", "backbone_channels", "backbone", "backbone_weights", "use_geometry", "use_visual",
      "use_identity", "use_phoneme", "num_classes", "group_size", "output_init_scale"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw InvalidConfig("unknown model config key '" + key + "'");
  }
  ModelConfig c;
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("architecture", c.architecture);
    get("d", c.d);
    get("heads", c.heads);
    get("key_dim", c.key_dim);
    get("geometry_hidden", c.geometry_hidden);
    get("identity_hidden", c.identity_hidden);
    get("head_hidden", c.head_hidden);
    get("conv3d_channels", c.conv3d_channels);
    get("backbone_channels", c.backbone_channels);
    get("backbone", c.backbone);
    get("backbone_weights", c.backbone_weights);
    get("use_geometry", c.use_geometry);
    get("use_visual", c.use_visual);
    get("use_identity", c.use_identity);
    get("use_phoneme", c.use_phoneme);
    get("num_classes", c.num_classes);
    get("group_size", c.group_size);
    get("output_init_scale", c.output_init_scale);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("bad model config value: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace pia::model
