#include "pia/harness/config.hpp"

#include <set>

#include "pia/errors.hpp"

namespace pia::harness {

namespace {

const std::set<std::string>& keys() {
  static const std::set<std::string> k = {"optimizer", "learning_rate", "weight_decay",    "epochs",
                                          "batch_size", "lambda",       "heads",           "seed",
                                          "label_smoothing", "beta1",   "beta2",           "adam_epsilon"};
  return k;
}

}  // namespace

void TrainConfig::validate() const {
  if (optimizer != "adam") throw InvalidConfig("only the adam optimizer is supported");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw InvalidConfig("weight_decay must be non-negative");
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (!(lambda >= 0.0)) throw InvalidConfig("lambda must be non-negative");
  if (heads < 1) throw InvalidConfig("heads must be >= 1");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) throw InvalidConfig("label_smoothing must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw InvalidConfig("betas must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw InvalidConfig("adam_epsilon must be positive");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["optimizer"] = optimizer;
  j["learning_rate"] = learning_rate;
  j["weight_decay"] = weight_decay;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["lambda"] = lambda;
  j["heads"] = heads;
  j["seed"] = seed;
  j["label_smoothing"] = label_smoothing;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["adam_epsilon"] = adam_epsilon;
  return j;
}

bool TrainConfig::is_key(const std::string& key) { return keys().contains(key); }

void TrainConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("train config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!is_key(key)) throw InvalidConfig("unknown train config key '" + key + "'");
  }
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("optimizer", optimizer);
    get("learning_rate", learning_rate);
    get("weight_decay", weight_decay);
    get("epochs", epochs);
    get("batch_size", batch_size);
    get("lambda", lambda);
    get("heads", heads);
    get("seed", seed);
    get("label_smoothing", label_smoothing);
    get("beta1", beta1);
    get("beta2", beta2);
    get("adam_epsilon", adam_epsilon);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("bad train config value: ") + e.what());
  }
  validate();
}

}  // namespace pia::harness
