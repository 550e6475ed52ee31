#include "pia/harness/ablation.hpp"

#include <algorithm>

#include "pia/errors.hpp"
#include "pia/harness/train.hpp"

namespace pia::harness {

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names = {"full",     "w/o_vi",      "w/o_geom",      "w/o_arc",
                                                 "w_ph",     "w/o_EB0",     "plain_cnn",     "w_ph_w/o_vi",
                                                 "w_ph_w/o_geom", "w_ph_w/o_arc"};
  return names;
}

AblationVariant ablation_variant(const std::string& name, const model::ModelConfig& base, const TrainConfig& train) {
  const auto& names = ablation_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw InvalidConfig("unknown ablation '" + name + "'");
  }
  AblationVariant v{base, train};
  std::string rest = name;
  if (rest.rfind("w_ph", 0) == 0) {
    v.model.use_phoneme = true;
    rest = rest.size() > 4 ? rest.substr(5) : "full";
  }
  if (rest == "w/o_vi") {
    v.model.use_visual = false;
  } else if (rest == "w/o_geom") {
    v.model.use_geometry = false;
  } else if (rest == "w/o_arc") {
    v.model.use_identity = false;
    v.train.lambda = 0.0;
  } else if (rest == "w/o_EB0") {
    v.model.backbone = "frozen";
  } else if (rest == "plain_cnn") {
    v.model.architecture = "plain_cnn";
  }
  v.model.validate();
  return v;
}

EvalReport run_ablation(const std::string& name, const Dataset& train_set, const Dataset& test_set,
                        const model::ModelConfig& base, const TrainConfig& train_config, const std::string& out_dir,
                        std::ostream* progress) {
  const auto variant = ablation_variant(name, base, train_config);
  auto trained = train(variant.model, train_set, variant.train, out_dir, progress);
  return evaluate(*trained.model, test_set);
}

}  // namespace pia::harness
