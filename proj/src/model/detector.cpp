#include "pia/model/detector.hpp"

#include <cmath>
#include <limits>

#include "pia/alignment/alignment.hpp"
#include "pia/errors.hpp"
#include "pia/extractors/container.hpp"

namespace pia::model {

namespace {

constexpr Eigen::Index kCropValues = static_cast<Eigen::Index>(kCropSize) * kCropSize * kCropChannels;
constexpr Eigen::Index kPlane = static_cast<Eigen::Index>(kCropSize) * kCropSize;

void check_crops(const GroupInput& g, int frames) {
  if (static_cast<int>(g.crops.size()) != frames) {
    throw ShapeError("group has " + std::to_string(g.crops.size()) + " crops, expected " + std::to_string(frames));
  }
  for (const auto& c : g.crops) {
    if (static_cast<Eigen::Index>(c.size()) != kCropValues) throw ShapeError("crop must be 112x112x3");
  }
}

}  // namespace

std::array<float, kPhonemeCount> phoneme_one_hot(const std::string& symbol) {
  const auto index = alignment::PhonemeVocabulary::index_of(symbol);
  if (!index) throw InvalidInput("'" + symbol + "' is not in the phoneme vocabulary");
  std::array<float, kPhonemeCount> v{};
  v[static_cast<std::size_t>(*index)] = 1.0f;
  return v;
}

std::vector<double> fuse(std::span<const double> g, std::span<const double> v, std::span<const double> a) {
  if (g.size() != v.size() || v.size() != a.size()) {
    throw ShapeError("stream embeddings differ in size: " + std::to_string(g.size()) + ", " +
                     std::to_string(v.size()) + ", " + std::to_string(a.size()));
  }
  std::vector<double> f(g.begin(), g.end());
  f.insert(f.end(), v.begin(), v.end());
  f.insert(f.end(), a.begin(), a.end());
  return f;
}

// ------------------------------------------------------------- geometry

template <typename S>
GeometryEncoder<S>::GeometryEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng)
    : frames_(config.group_size),
      mlp_(store, "geometry.mlp", {config.group_size * kGeometryFeatures, config.geometry_hidden, config.d}, rng) {}

template <typename S>
Mat<S> GeometryEncoder<S>::forward(std::span<const GroupInput> groups) {
  Mat<S> x(static_cast<Eigen::Index>(groups.size()), frames_ * kGeometryFeatures);
  for (std::size_t t = 0; t < groups.size(); ++t) {
    if (static_cast<int>(groups[t].geometry.size()) != frames_) throw ShapeError("group geometry frame count");
    for (int f = 0; f < frames_; ++f) {
      for (int k = 0; k < kGeometryFeatures; ++k) {
        x(static_cast<Eigen::Index>(t), f * kGeometryFeatures + k) = static_cast<S>(groups[t].geometry[f][k]);
      }
    }
  }
  return mlp_.forward(x);
}

template <typename S>
void GeometryEncoder<S>::backward(const Mat<S>& dy) {
  mlp_.backward(dy);
}

// --------------------------------------------------------------- visual

template <typename S>
VisualEncoder<S>::VisualEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng)
    : frames_(config.group_size),
      conv3d_(store, "visual.conv3d", 3 * kCropChannels, config.conv3d_channels, 3, 1, 1, rng) {
  const bool trainable = config.backbone == "trainable";
  int in = config.conv3d_channels;
  for (std::size_t i = 0; i < config.backbone_channels.size(); ++i) {
    backbone_.emplace_back(store, "visual.backbone." + std::to_string(i), in, config.backbone_channels[i], 3, 2, 1,
                           rng, trainable);
    in = config.backbone_channels[i];
  }
  proj_ = Linear<S>(store, "visual.proj", in, config.d, rng);
}

template <typename S>
Mat<S> VisualEncoder<S>::forward(std::span<const GroupInput> groups) {
  FeatureMap<S> x;
  x.n = static_cast<int>(groups.size());
  x.height = kCropSize;
  x.width = kCropSize;
  x.data = Mat<S>::Zero(3 * kCropChannels, x.n * kPlane);
  const S scale = S(1) / static_cast<S>(frames_);
  for (int t = 0; t < x.n; ++t) {
    const auto& g = groups[static_cast<std::size_t>(t)];
    check_crops(g, frames_);
    for (int tap = 0; tap < 3; ++tap) {
      // Frames seen by this temporal tap across all output times (zero padding outside).
      const int offset = tap - 1;
      const int first = std::max(0, offset);
      const int last = std::min(frames_ - 1, frames_ - 1 + offset);
      for (int c = 0; c < kCropChannels; ++c) {
        S* dst = x.data.row(tap * kCropChannels + c).data() + t * kPlane;
        for (int f = first; f <= last; ++f) {
          const float* src = g.crops[static_cast<std::size_t>(f)].data();
          for (Eigen::Index p = 0; p < kPlane; ++p) dst[p] += static_cast<S>(src[p * kCropChannels + c]);
        }
        for (Eigen::Index p = 0; p < kPlane; ++p) dst[p] *= scale;
      }
    }
  }

  activations_.clear();
  conv_mean_ = conv3d_.forward(x);
  FeatureMap<S> h = conv_mean_;
  relu_inplace(h.data);
  activations_.push_back(h);
  for (auto& conv : backbone_) {
    h = conv.forward(h);
    relu_inplace(h.data);
    activations_.push_back(h);
  }
  return proj_.forward(global_average_pool(h));
}

template <typename S>
void VisualEncoder<S>::backward(const Mat<S>& dy) {
  const Mat<S> dpool = proj_.backward(dy);
  const auto& top = activations_.back();
  FeatureMap<S> g = global_average_pool_backward(dpool, top.height, top.width);
  for (std::size_t i = backbone_.size(); i-- > 0;) {
    g.data = relu_backward(g.data, activations_[i + 1].data);
    g = backbone_[i].backward(g);
  }
  g.data = relu_backward(g.data, activations_[0].data);
  conv3d_.backward(g, false);
}

// ------------------------------------------------------------- identity

template <typename S>
IdentityEncoder<S>::IdentityEncoder(ParamStore<S>& store, const ModelConfig& config, Rng& rng)
    : mlp_(store, "identity.mlp", {kIdentityDim, config.identity_hidden, config.d}, rng) {}

template <typename S>
Mat<S> IdentityEncoder<S>::forward(std::span<const GroupInput> groups) {
  Mat<S> x = Mat<S>::Zero(static_cast<Eigen::Index>(groups.size()), kIdentityDim);
  for (std::size_t t = 0; t < groups.size(); ++t) {
    const auto& ids = groups[t].identities;
    if (ids.empty()) throw ShapeError("group has no identity embeddings");
    for (const auto& e : ids) {
      if (e.size() != static_cast<std::size_t>(kIdentityDim)) throw ShapeError("identity embedding must be 512-d");
      for (int k = 0; k < kIdentityDim; ++k) x(static_cast<Eigen::Index>(t), k) += static_cast<S>(e[k]);
    }
    x.row(static_cast<Eigen::Index>(t)) /= static_cast<S>(ids.size());
  }
  return mlp_.forward(x);
}

template <typename S>
void IdentityEncoder<S>::backward(const Mat<S>& dy) {
  mlp_.backward(dy);
}

// ------------------------------------------------------------ attention

template <typename S>
AttentionPool<S>::AttentionPool(ParamStore<S>& store, const std::string& name, int in_dim, int key_dim,
                                int value_dim, int heads, Rng& rng)
    : heads_(heads),
      key_dim_(key_dim),
      value_dim_(value_dim),
      key_(store, name + ".key", in_dim, key_dim, rng),
      value_(store, name + ".value", in_dim, heads * value_dim, rng),
      queries_(&store.add(name + ".queries", heads, key_dim)) {
  init_normal(*queries_, rng, 1.0);
}

template <typename S>
Mat<S> AttentionPool<S>::forward(const Mat<S>& f, const std::vector<bool>& mask) {
  const Eigen::Index t_count = f.rows();
  mask_ = mask.empty() ? std::vector<bool>(static_cast<std::size_t>(t_count), true) : mask;
  if (static_cast<Eigen::Index>(mask_.size()) != t_count) throw ShapeError("mask length differs from sequence length");
  bool any = false;
  for (bool m : mask_) any = any || m;
  if (!any) throw EmptySequence("every position of the sequence is masked");

  keys_ = key_.forward(f);
  values_ = value_.forward(f);
  const S inv_sqrt = S(1) / std::sqrt(static_cast<S>(key_dim_));
  const Mat<S> scores = (queries_->value * keys_.transpose()) * inv_sqrt;
  alpha_ = Mat<S>::Zero(heads_, t_count);
  for (int h = 0; h < heads_; ++h) {
    S max_score = -std::numeric_limits<S>::infinity();
    for (Eigen::Index t = 0; t < t_count; ++t) {
      if (mask_[static_cast<std::size_t>(t)]) max_score = std::max(max_score, scores(h, t));
    }
    S total = 0;
    for (Eigen::Index t = 0; t < t_count; ++t) {
      if (!mask_[static_cast<std::size_t>(t)]) continue;
      alpha_(h, t) = std::exp(scores(h, t) - max_score);
      total += alpha_(h, t);
    }
    alpha_.row(h) /= total;
  }

  Mat<S> z = Mat<S>::Zero(1, value_dim_);
  for (int h = 0; h < heads_; ++h) z.noalias() += alpha_.row(h) * values_.middleCols(h * value_dim_, value_dim_);
  z /= static_cast<S>(heads_);
  return z;
}

template <typename S>
Mat<S> AttentionPool<S>::backward(const Mat<S>& dz) {
  const Eigen::Index t_count = values_.rows();
  const S inv_heads = S(1) / static_cast<S>(heads_);
  const S inv_sqrt = S(1) / std::sqrt(static_cast<S>(key_dim_));
  Mat<S> dvalues(t_count, heads_ * value_dim_);
  Mat<S> dscores(heads_, t_count);
  for (int h = 0; h < heads_; ++h) {
    const auto block = values_.middleCols(h * value_dim_, value_dim_);
    dvalues.middleCols(h * value_dim_, value_dim_).noalias() = inv_heads * alpha_.row(h).transpose() * dz;
    const RowVec<S> dalpha = inv_heads * (block * dz.transpose()).transpose();
    const S weighted = alpha_.row(h).dot(dalpha);
    dscores.row(h) = alpha_.row(h).array() * (dalpha.array() - weighted);
  }
  queries_->grad.noalias() += inv_sqrt * dscores * keys_;
  const Mat<S> dkeys = inv_sqrt * dscores.transpose() * queries_->value;
  Mat<S> df = key_.backward(dkeys);
  df += value_.backward(dvalues);
  return df;
}

// ------------------------------------------------------------- detector

template <typename S>
DetectionScore Detector<S>::score(const VideoInput& video) {
  const auto logits = forward(video);
  DetectionScore s;
  s.logits = {static_cast<double>(logits[0]), static_cast<double>(logits[1])};
  s.probability = 1.0 / (1.0 + std::exp(s.logits[0] - s.logits[1]));
  return s;
}

template <typename S>
PiaDetector<S>::PiaDetector(const ModelConfig& config, std::uint64_t seed) : Detector<S>(config) {
  config.validate();
  Rng rng(seed);
  auto& store = this->params_;
  int width = 0;
  if (config.use_geometry) {
    geometry_ = std::make_unique<GeometryEncoder<S>>(store, config, rng);
    width += config.d;
  }
  if (config.use_visual) {
    visual_ = std::make_unique<VisualEncoder<S>>(store, config, rng);
    width += config.d;
  }
  if (config.use_identity) {
    identity_ = std::make_unique<IdentityEncoder<S>>(store, config, rng);
    width += config.d;
  }
  if (config.use_phoneme) width += kPhonemeCount;
  attention_ = std::make_unique<AttentionPool<S>>(store, "attention", width, config.key_dim, config.d, config.heads, rng);
  head_ = Mlp<S>(store, "head", {config.d, config.head_hidden, config.num_classes}, rng, config.output_init_scale);
}

template <typename S>
std::array<S, 2> PiaDetector<S>::forward(const VideoInput& video) {
  const auto& groups = video.groups;
  if (groups.empty()) throw EmptySequence("video " + video.id + " has no phoneme groups");
  const auto t_count = static_cast<Eigen::Index>(groups.size());
  std::vector<Mat<S>> blocks;
  if (geometry_) blocks.push_back(geometry_->forward(groups));
  if (visual_) blocks.push_back(visual_->forward(groups));
  if (identity_) blocks.push_back(identity_->forward(groups));
  if (this->config_.use_phoneme) {
    Mat<S> onehot = Mat<S>::Zero(t_count, kPhonemeCount);
    for (Eigen::Index t = 0; t < t_count; ++t) {
      const int symbol = groups[static_cast<std::size_t>(t)].symbol;
      if (symbol < 0 || symbol >= kPhonemeCount) throw InvalidInput("phoneme index out of range");
      onehot(t, symbol) = S(1);
    }
    blocks.push_back(std::move(onehot));
  }
  Eigen::Index width = 0;
  for (const auto& b : blocks) width += b.cols();
  fused_.resize(t_count, width);
  Eigen::Index col = 0;
  for (const auto& b : blocks) {
    fused_.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  std::vector<bool> mask(groups.size());
  for (std::size_t t = 0; t < groups.size(); ++t) mask[t] = groups[t].valid;
  const Mat<S> z = attention_->forward(fused_, mask);
  const Mat<S> logits = head_.forward(z);
  return {logits(0, 0), logits(0, 1)};
}

template <typename S>
void PiaDetector<S>::backward(const std::array<S, 2>& dlogits) {
  Mat<S> dl(1, 2);
  dl << dlogits[0], dlogits[1];
  const Mat<S> dz = head_.backward(dl);
  const Mat<S> dfused = attention_->backward(dz);
  const int d = this->config_.d;
  Eigen::Index col = 0;
  if (geometry_) {
    geometry_->backward(dfused.middleCols(col, d));
    col += d;
  }
  if (visual_) {
    visual_->backward(dfused.middleCols(col, d));
    col += d;
  }
  if (identity_) identity_->backward(dfused.middleCols(col, d));
}

template <typename S>
DetectionScore PiaDetector<S>::score(const VideoInput& video) {
  DetectionScore s = Detector<S>::score(video);
  const auto& alpha = attention_->weights();
  s.attention.assign(static_cast<std::size_t>(alpha.rows()), std::vector<double>(static_cast<std::size_t>(alpha.cols())));
  for (Eigen::Index h = 0; h < alpha.rows(); ++h) {
    for (Eigen::Index t = 0; t < alpha.cols(); ++t) s.attention[h][t] = static_cast<double>(alpha(h, t));
  }
  return s;
}

// ------------------------------------------------------------ plain cnn

template <typename S>
PlainCnnDetector<S>::PlainCnnDetector(const ModelConfig& config, std::uint64_t seed) : Detector<S>(config) {
  config.validate();
  Rng rng(seed);
  int in = kCropChannels;
  for (std::size_t i = 0; i < config.backbone_channels.size(); ++i) {
    convs_.emplace_back(this->params_, "cnn." + std::to_string(i), in, config.backbone_channels[i], 3, 2, 1, rng,
                        config.backbone == "trainable");
    in = config.backbone_channels[i];
  }
  head_ = Mlp<S>(this->params_, "head", {in, config.head_hidden, config.num_classes}, rng, config.output_init_scale);
}

template <typename S>
std::array<S, 2> PlainCnnDetector<S>::forward(const VideoInput& video) {
  std::vector<const GroupInput*> usable;
  for (const auto& g : video.groups) {
    if (g.valid) usable.push_back(&g);
  }
  if (usable.empty()) throw EmptySequence("video " + video.id + " has no usable phoneme groups");
  const int frames = this->config_.group_size;
  FeatureMap<S> x;
  x.n = static_cast<int>(usable.size()) * frames;
  x.height = kCropSize;
  x.width = kCropSize;
  x.data.resize(kCropChannels, x.n * kPlane);
  int img = 0;
  for (const auto* g : usable) {
    check_crops(*g, frames);
    for (const auto& crop : g->crops) {
      for (int c = 0; c < kCropChannels; ++c) {
        S* dst = x.data.row(c).data() + img * kPlane;
        for (Eigen::Index p = 0; p < kPlane; ++p) dst[p] = static_cast<S>(crop[p * kCropChannels + c]);
      }
      ++img;
    }
  }
  frames_used_ = x.n;
  activations_.clear();
  FeatureMap<S> h = x;
  for (auto& conv : convs_) {
    h = conv.forward(h);
    relu_inplace(h.data);
    activations_.push_back(h);
  }
  const Mat<S> pooled = global_average_pool(h).colwise().mean();
  const Mat<S> logits = head_.forward(pooled);
  return {logits(0, 0), logits(0, 1)};
}

template <typename S>
void PlainCnnDetector<S>::backward(const std::array<S, 2>& dlogits) {
  Mat<S> dl(1, 2);
  dl << dlogits[0], dlogits[1];
  const Mat<S> dpooled = head_.backward(dl);
  const Mat<S> dframes = dpooled.replicate(frames_used_, 1) / static_cast<S>(frames_used_);
  const auto& top = activations_.back();
  FeatureMap<S> g = global_average_pool_backward(dframes, top.height, top.width);
  for (std::size_t i = convs_.size(); i-- > 0;) {
    g.data = relu_backward(g.data, activations_[i].data);
    g = convs_[i].backward(g, i > 0);
  }
}

// ----------------------------------------------------------- factories

namespace {

template <typename S>
std::unique_ptr<Detector<S>> build(const ModelConfig& config, std::uint64_t seed, bool apply_backbone_weights) {
  config.validate();
  std::unique_ptr<Detector<S>> detector;
  if (config.architecture == "plain_cnn") {
    detector = std::make_unique<PlainCnnDetector<S>>(config, seed);
  } else {
    detector = std::make_unique<PiaDetector<S>>(config, seed);
  }
  if (apply_backbone_weights && !config.backbone_weights.empty()) {
    load_weights(*detector, config.backbone_weights, config.architecture == "plain_cnn" ? "cnn." : "visual.backbone.");
  }
  return detector;
}

}  // namespace

template <typename S>
std::unique_ptr<Detector<S>> make_detector(const ModelConfig& config, std::uint64_t seed) {
  return build<S>(config, seed, true);
}

template <typename S>
void save_checkpoint(const std::string& path, const Detector<S>& detector, const nlohmann::json& extra) {
  extractors::Container c;
  c.magic = kCheckpointMagic;
  c.version = kCheckpointVersion;
  c.metadata["model_config"] = detector.config().to_json();
  c.metadata["extra"] = extra.is_null() ? nlohmann::json::object() : extra;
  auto shapes = nlohmann::json::object();
  for (const auto& p : detector.params().all()) {
    shapes[p.name] = {p.value.rows(), p.value.cols()};
    extractors::Blob b{p.name, std::vector<float>(static_cast<std::size_t>(p.value.size()))};
    for (Eigen::Index i = 0; i < p.value.size(); ++i) b.data[i] = static_cast<float>(p.value.data()[i]);
    c.blobs.push_back(std::move(b));
  }
  c.metadata["shapes"] = std::move(shapes);
  extractors::write_container(path, c);
}

template <typename S>
void load_weights(Detector<S>& detector, const std::string& path, const std::string& prefix) {
  const auto c = extractors::read_container(path, kCheckpointMagic, kCheckpointVersion);
  bool any = false;
  for (auto& p : detector.params().all()) {
    if (p.name.rfind(prefix, 0) != 0) continue;
    if (!c.has_blob(p.name)) throw CacheError(path + " has no weights for " + p.name);
    const auto& data = c.blob(p.name).data;
    if (static_cast<Eigen::Index>(data.size()) != p.value.size()) throw CacheError("shape mismatch for " + p.name);
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<S>(data[i]);
    any = true;
  }
  if (!any) throw CacheError(path + " supplies no parameters with prefix '" + prefix + "'");
}

template <typename S>
std::unique_ptr<Detector<S>> load_checkpoint(const std::string& path) {
  const auto c = extractors::read_container(path, kCheckpointMagic, kCheckpointVersion);
  ModelConfig config;
  try {
    config = ModelConfig::from_json(c.metadata.at("model_config"));
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("checkpoint has no model config: ") + e.what());
  }
  auto detector = build<S>(config, 0, false);
  for (auto& p : detector->params().all()) {
    if (!c.has_blob(p.name)) throw CacheError(path + " has no weights for " + p.name);
    const auto& data = c.blob(p.name).data;
    if (static_cast<Eigen::Index>(data.size()) != p.value.size()) throw CacheError("shape mismatch for " + p.name);
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<S>(data[i]);
  }
  return detector;
}

#define PIA_INSTANTIATE(S)                                                                              \
  template class GeometryEncoder<S>;                                                                    \
  template class VisualEncoder<S>;                                                                      \
  template class IdentityEncoder<S>;                                                                    \
  template class AttentionPool<S>;                                                                      \
  template class Detector<S>;                                                                           \
  template class PiaDetector<S>;                                                                        \
  template class PlainCnnDetector<S>;                                                                   \
  template std::unique_ptr<Detector<S>> make_detector<S>(const ModelConfig&, std::uint64_t);           \
  template void save_checkpoint<S>(const std::string&, const Detector<S>&, const nlohmann::json&);      \
  template std::unique_ptr<Detector<S>> load_checkpoint<S>(const std::string&);                        \
  template void load_weights<S>(Detector<S>&, const std::string&, const std::string&);

PIA_INSTANTIATE(float)
PIA_INSTANTIATE(double)

#undef PIA_INSTANTIATE

}  // namespace pia::model
