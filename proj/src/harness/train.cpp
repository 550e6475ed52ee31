#include "pia/harness/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "pia/errors.hpp"
#include "pia/util/random.hpp"

namespace pia::harness {

Adam::Adam(model::ParamStore<float>& params, const TrainConfig& config) : params_(params), config_(config) {
  for (const auto& p : params_.all()) {
    m_.push_back(model::Mat<float>::Zero(p.value.rows(), p.value.cols()));
    v_.push_back(model::Mat<float>::Zero(p.value.rows(), p.value.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const auto lr_t = static_cast<float>(config_.learning_rate * std::sqrt(1.0 - std::pow(b2, t_)) /
                                       (1.0 - std::pow(b1, t_)));
  const auto eps_t = static_cast<float>(config_.adam_epsilon * std::sqrt(1.0 - std::pow(b2, t_)));
  const auto wd = static_cast<float>(config_.weight_decay);
  const auto fb1 = static_cast<float>(b1);
  const auto fb2 = static_cast<float>(b2);
  std::size_t i = 0;
  for (auto& p : params_.all()) {
    auto& m = m_[i];
    auto& v = v_[i];
    ++i;
    if (!p.trainable) continue;
    const model::Mat<float> g = p.grad + wd * p.value;
    m = fb1 * m + (1.0f - fb1) * g;
    v = fb2 * v + (1.0f - fb2) * g.cwiseProduct(g);
    p.value.array() -= lr_t * m.array() / (v.array().sqrt() + eps_t);
  }
}

double video_arcface(const model::VideoInput& video) {
  if (video.frame_embeddings.size() < 2) return 0.0;
  return losses::arcface_consistency(std::span<const std::vector<float>>(video.frame_embeddings), video.frame_mask);
}

TrainResult train(const model::ModelConfig& model_config, const Dataset& train_set, const TrainConfig& config,
                  const std::string& out_dir, std::ostream* progress) {
  config.validate();
  require_both_classes(train_set, "training set");
  model::ModelConfig mc = model_config;
  mc.heads = config.heads;

  TrainResult result;
  result.model = model::make_detector<float>(mc, derive_seed(config.seed, 1));
  auto& detector = *result.model;
  Adam adam(detector.params(), config);

  std::vector<double> arcface(train_set.videos.size());
  for (std::size_t i = 0; i < arcface.size(); ++i) arcface[i] = video_arcface(train_set.videos[i]);

  std::filesystem::create_directories(out_dir);
  result.log = (std::filesystem::path(out_dir) / "train_log.jsonl").string();
  std::ofstream log(result.log, std::ios::binary);
  if (!log) throw InvalidConfig("cannot write " + result.log);

  std::vector<std::size_t> order(train_set.videos.size());
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    }
    double epoch_total = 0.0;
    int epoch_steps = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const auto batch = static_cast<float>(end - start);
      detector.params().zero_grad();
      double ce_sum = 0.0;
      double arc_sum = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& video = train_set.videos[order[k]];
        const auto logits = detector.forward(video);
        std::array<float, 2> grad{};
        const float ce = losses::cross_entropy_smoothed<float>(std::span<const float>(logits), static_cast<int>(video.label),
                                                               config.label_smoothing, &grad);
        detector.backward({grad[0] / batch, grad[1] / batch});
        ce_sum += ce;
        arc_sum += arcface[order[k]];
      }
      adam.step();
      const auto loss = losses::make_breakdown(ce_sum / batch, arc_sum / batch, config.lambda);
      result.history.push_back(loss);
      log << losses::breakdown_json_line(++step, loss) << '\n';
      epoch_total += loss.total;
      ++epoch_steps;
    }
    if (progress != nullptr) {
      *progress << "epoch " << epoch + 1 << "/" << config.epochs << " mean loss " << epoch_total / epoch_steps << '\n';
    }
  }

  result.checkpoint = (std::filesystem::path(out_dir) / "model.ckpt").string();
  model::save_checkpoint(result.checkpoint, detector, {{"train_config", config.to_json()}, {"steps", step}});
  return result;
}

}  // namespace pia::harness
