#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pia/harness/config.hpp"
#include "pia/harness/dataset.hpp"
#include "pia/losses/losses.hpp"
#include "pia/model/detector.hpp"

namespace pia::harness {

// Adam with L2 weight decay added to the gradient; skips frozen parameters.
class Adam {
 public:
  Adam(model::ParamStore<float>& params, const TrainConfig& config);
  void step();
  long steps() const { return t_; }

 private:
  model::ParamStore<float>& params_;
  TrainConfig config_;
  std::vector<model::Mat<float>> m_;
  std::vector<model::Mat<float>> v_;
  long t_ = 0;
};

struct TrainResult {
  std::vector<losses::LossBreakdown> history;  // one entry per optimizer step (batch means)
  std::string checkpoint;
  std::string log;
  std::unique_ptr<model::Detector<float>> model;
};

// Trains on every video of the dataset in seeded shuffled batches, writing
// out_dir/model.ckpt and the per-step loss log out_dir/train_log.jsonl.
// Throws InvalidDataset for empty or single-class data.
TrainResult train(const model::ModelConfig& model_config, const Dataset& train_set, const TrainConfig& config,
                  const std::string& out_dir, std::ostream* progress = nullptr);

// Frame-sequence identity consistency of a video (the arcface term).
double video_arcface(const model::VideoInput& video);

}  // namespace pia::harness
