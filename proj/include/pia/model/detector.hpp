#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pia/model/config.hpp"
#include "pia/model/layers.hpp"
#include "pia/types.hpp"

namespace pia::model {

inline constexpr int kPhonemeCount = 14;

// One phoneme group: the five aligned frames' crops, geometry and identities.
struct GroupInput {
  int symbol = 0;                                // vocabulary index
  std::vector<std::vector<float>> crops;         // 112x112x3 HWC, normalized
  std::vector<GeometryVector> geometry;
  std::vector<std::vector<float>> identities;    // 512 components each
  bool valid = true;                             // every frame carries a face and speech
};

struct VideoInput {
  std::string id;
  Label label = Label::kReal;
  std::string category = "real";
  std::vector<GroupInput> groups;                  // temporal order
  std::vector<std::vector<float>> frame_embeddings;  // identities of the sampled frames, in order
  std::vector<bool> frame_mask;
};

// Indicator vector of the symbol's vocabulary index. Throws InvalidInput for unknown symbols.
std::array<float, kPhonemeCount> phoneme_one_hot(const std::string& symbol);

// g ⊕ v ⊕ a. Throws ShapeError when the three lengths differ.
std::vector<double> fuse(std::span<const double> g, std::span<const double> v, std::span<const double> a);

template <typename S>
class GeometryEncoder {
 public:
  GeometryEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng);
  Mat<S> forward(std::span<const GroupInput> groups);  // [T, d]
  void backward(const Mat<S>& dy);

 private:
  int frames_;
  Mlp<S> mlp_;
};

// 3x3x3 convolution over the stacked frames (zero padding 1 in time and
// space), mean over time, ReLU, stride-2 conv blocks, global pooling and a
// linear projection to d.
template <typename S>
class VisualEncoder {
 public:
  VisualEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng);
  Mat<S> forward(std::span<const GroupInput> groups);  // [T, d]
  void backward(const Mat<S>& dy);

  // Temporal mean of the 3D convolution (before the ReLU) from the last forward.
  const FeatureMap<S>& temporal_response() const { return conv_mean_; }
  Param<S>& conv3d_weight() { return conv3d_.weight(); }  // [C, (tap * 3 + channel) * 9 + ky * 3 + kx]
  Param<S>& conv3d_bias() { return conv3d_.bias(); }

 private:
  int frames_;
  Conv2d<S> conv3d_;
  std::vector<Conv2d<S>> backbone_;
  Linear<S> proj_;
  FeatureMap<S> conv_mean_;
  std::vector<FeatureMap<S>> activations_;  // post-ReLU outputs: conv3d, then each block
};

template <typename S>
class IdentityEncoder {
 public:
  IdentityEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng);
  Mat<S> forward(std::span<const GroupInput> groups);  // [T, d]
  void backward(const Mat<S>& dy);

 private:
  Mlp<S> mlp_;
};

// Multi-head attention pooling over a sequence F [T, in]:
//   k_t = W_k f_t + b_k (shared), s_{h,t} = q_h . k_t / sqrt(d_k),
//   alpha_h = softmax over unmasked t, f'_{h,t} = W_{v,h} f_t + b_{v,h},
//   z = (1/H) sum_h sum_t alpha_{h,t} f'_{h,t}.
template <typename S>
class AttentionPool {
 public:
  AttentionPool(ParamStore<S>& store, const std::string& name, int in_dim, int key_dim, int value_dim, int heads,
                Rng& rng);

  // Throws EmptySequence when no position is unmasked.
  Mat<S> forward(const Mat<S>& f, const std::vector<bool>& mask);  // [1, value_dim]
  Mat<S> backward(const Mat<S>& dz);                               // [T, in]

  const Mat<S>& weights() const { return alpha_; }                 // [H, T]
  const Mat<S>& values() const { return values_; }                 // [T, H * value_dim]
  Param<S>& queries() { return *queries_; }
  int heads() const { return heads_; }

 private:
  int heads_;
  int key_dim_;
  int value_dim_;
  Linear<S> key_;
  Linear<S> value_;
  Param<S>* queries_;
  Mat<S> keys_;
  Mat<S> values_;
  Mat<S> alpha_;
  std::vector<bool> mask_;
};

struct DetectionScore {
  std::array<double, 2> logits{};
  double probability = 0.5;  // softmax(logits)[fake]
  std::vector<std::vector<double>> attention;  // [head][group], empty for plain_cnn
};

template <typename S>
class Detector {
 public:
  virtual ~Detector() = default;

  // Logits for one video. Throws EmptySequence when it has no usable group.
  virtual std::array<S, 2> forward(const VideoInput& video) = 0;
  // Accumulates parameter gradients for the most recent forward.
  virtual void backward(const std::array<S, 2>& dlogits) = 0;
  virtual DetectionScore score(const VideoInput& video);

  ParamStore<S>& params() { return params_; }
  const ParamStore<S>& params() const { return params_; }
  const ModelConfig& config() const { return config_; }

 protected:
  explicit Detector(ModelConfig config) : config_(std::move(config)) {}

  ModelConfig config_;
  ParamStore<S> params_;
};

template <typename S>
class PiaDetector final : public Detector<S> {
 public:
  PiaDetector(const ModelConfig& config, std::uint64_t seed);

  std::array<S, 2> forward(const VideoInput& video) override;
  void backward(const std::array<S, 2>& dlogits) override;
  DetectionScore score(const VideoInput& video) override;

  // Fused sequence [T, width] from the last forward.
  const Mat<S>& fused() const { return fused_; }
  AttentionPool<S>& attention() { return *attention_; }
  VisualEncoder<S>* visual() { return visual_.get(); }

 private:
  std::unique_ptr<GeometryEncoder<S>> geometry_;
  std::unique_ptr<VisualEncoder<S>> visual_;
  std::unique_ptr<IdentityEncoder<S>> identity_;
  std::unique_ptr<AttentionPool<S>> attention_;
  Mlp<S> head_;
  Mat<S> fused_;
};

// Per-frame CNN over the crops of every usable group, averaged, then an MLP head.
template <typename S>
class PlainCnnDetector final : public Detector<S> {
 public:
  PlainCnnDetector(const ModelConfig& config, std::uint64_t seed);

  std::array<S, 2> forward(const VideoInput& video) override;
  void backward(const std::array<S, 2>& dlogits) override;

 private:
  std::vector<Conv2d<S>> convs_;
  Mlp<S> head_;
  std::vector<FeatureMap<S>> activations_;
  int frames_used_ = 0;
};

// Builds the architecture named by the config with weights drawn from the seed,
// then applies config.backbone_weights when set.
template <typename S>
std::unique_ptr<Detector<S>> make_detector(const ModelConfig& config, std::uint64_t seed);

inline constexpr const char* kCheckpointMagic = "PIAM";
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Float32 weights plus the model config in the shared container format.
template <typename S>
void save_checkpoint(const std::string& path, const Detector<S>& detector, const nlohmann::json& extra = {});
template <typename S>
std::unique_ptr<Detector<S>> load_checkpoint(const std::string& path);
// Copies every parameter whose name starts with prefix from a checkpoint. Throws CacheError on shape mismatch.
template <typename S>
void load_weights(Detector<S>& detector, const std::string& path, const std::string& prefix);

}  // namespace pia::model
