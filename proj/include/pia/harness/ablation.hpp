#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pia/harness/config.hpp"
#include "pia/harness/dataset.hpp"
#include "pia/harness/evaluate.hpp"
#include "pia/model/config.hpp"

namespace pia::harness {

// Variant names: full, w/o_vi, w/o_geom, w/o_arc, w_ph, w/o_EB0, plain_cnn and
// the phoneme-stream combinations w_ph_w/o_vi, w_ph_w/o_geom, w_ph_w/o_arc.
const std::vector<std::string>& ablation_names();

struct AblationVariant {
  model::ModelConfig model;
  TrainConfig train;
};

// Applies a variant to the base configuration:
//   w/o_vi, w/o_geom   drop the viseme or geometry encoder;
//   w/o_arc            drop the identity encoder and the consistency term (lambda = 0);
//   w_ph               append the phoneme one-hot stream;
//   w/o_EB0            freeze the image backbone (optionally loaded from base.backbone_weights);
//   plain_cnn          replace the detector with a per-frame CNN over crops.
// Throws InvalidConfig for unknown names.
AblationVariant ablation_variant(const std::string& name, const model::ModelConfig& base, const TrainConfig& train);

// Trains the variant on train_set under out_dir and evaluates it on test_set.
EvalReport run_ablation(const std::string& name, const Dataset& train_set, const Dataset& test_set,
                        const model::ModelConfig& base, const TrainConfig& train, const std::string& out_dir,
                        std::ostream* progress = nullptr);

}  // namespace pia::harness
