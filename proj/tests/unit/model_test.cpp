#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "pia/errors.hpp"
#include "pia/harness/ablation.hpp"
#include "pia/losses/losses.hpp"
#include "pia/model/detector.hpp"
#include "pia/model/layers.hpp"
#include "pia/util/random.hpp"

using namespace pia;
using namespace pia::model;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.d = 8;
  c.heads = 2;
  c.key_dim = 4;
  c.geometry_hidden = 8;
  c.identity_hidden = 8;
  c.head_hidden = 8;
  c.conv3d_channels = 2;
  c.backbone_channels = {4, 4};
  return c;
}

VideoInput random_video(Rng& rng, int groups, Label label = Label::kReal) {
  VideoInput v;
  v.id = "v";
  v.label = label;
  for (int g = 0; g < groups; ++g) {
    GroupInput in;
    in.symbol = rng.uniform_int(0, kPhonemeCount - 1);
    for (int k = 0; k < 5; ++k) {
      std::vector<float> crop(static_cast<std::size_t>(kCropSize) * kCropSize * kCropChannels);
      for (auto& x : crop) x = static_cast<float>(rng.uniform(-1, 1));
      in.crops.push_back(std::move(crop));
      in.geometry.push_back({static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform()),
                             static_cast<float>(rng.uniform()), static_cast<float>(rng.uniform())});
      std::vector<float> id(kIdentityDim);
      for (auto& x : id) x = static_cast<float>(rng.normal());
      in.identities.push_back(id);
      v.frame_embeddings.push_back(id);
      v.frame_mask.push_back(true);
    }
    v.groups.push_back(std::move(in));
  }
  return v;
}

double fake_loss(const std::array<double, 2>& logits, std::array<double, 2>* grad = nullptr) {
  return losses::cross_entropy_smoothed<double>(logits, 1, losses::kDefaultSmoothing, grad);
}

}  // namespace

TEST(Layers, Conv2dMatchesDirectSum) {
  Rng rng(1);
  ParamStore<double> store;
  for (int stride : {1, 2}) {
    Conv2d<double> conv(store, "c" + std::to_string(stride), 2, 3, 3, stride, 1, rng);
    FeatureMap<double> x;
    x.n = 2;
    x.height = 5;
    x.width = 6;
    x.data = Mat<double>::Random(2, x.n * x.height * x.width);
    const auto y = conv.forward(x);
    const int oh = (x.height + 2 - 3) / stride + 1, ow = (x.width + 2 - 3) / stride + 1;
    ASSERT_EQ(y.height, oh);
    ASSERT_EQ(y.width, ow);
    const auto& w = conv.weight().value;
    const auto& b = conv.bias().value;
    for (int n = 0; n < x.n; ++n) {
      for (int o = 0; o < 3; ++o) {
        for (int yy = 0; yy < oh; ++yy) {
          for (int xx = 0; xx < ow; ++xx) {
            double acc = b(o, 0);
            for (int c = 0; c < 2; ++c) {
              for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                  const int iy = yy * stride - 1 + ky, ix = xx * stride - 1 + kx;
                  if (iy < 0 || iy >= x.height || ix < 0 || ix >= x.width) continue;
                  acc += w(o, (c * 3 + ky) * 3 + kx) * x.data(c, (n * x.height + iy) * x.width + ix);
                }
              }
            }
            EXPECT_NEAR(y.data(o, (n * oh + yy) * ow + xx), acc, 1e-12);
          }
        }
      }
    }
  }
}

TEST(Layers, GlobalPoolRoundTrip) {
  FeatureMap<double> x;
  x.n = 2;
  x.height = 2;
  x.width = 2;
  x.data = Mat<double>(1, 8);
  x.data << 1, 2, 3, 4, 5, 6, 7, 8;
  const auto pooled = global_average_pool(x);
  EXPECT_EQ(pooled(0, 0), 2.5);
  EXPECT_EQ(pooled(1, 0), 6.5);
  const auto back = global_average_pool_backward<double>(Mat<double>::Ones(2, 1), 2, 2);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(back.data(0, i), 0.25);
}

TEST(Detector, FuseConcatenates) {
  const std::vector<double> g{1, 2}, v{3, 4}, a{5, 6};
  EXPECT_EQ(fuse(g, v, a), (std::vector<double>{1, 2, 3, 4, 5, 6}));
  const std::vector<double> shorter{1};
  EXPECT_THROW(fuse(g, shorter, a), ShapeError);
}

TEST(Detector, PhonemeOneHot) {
  const auto h = phoneme_one_hot("m");
  EXPECT_EQ(std::count(h.begin(), h.end(), 1.0f), 1);
  EXPECT_THROW(phoneme_one_hot("ə"), InvalidInput);
}

TEST(Detector, TemporalConvolutionMatchesOracle) {
  Rng rng(2);
  ModelConfig c = small_config();
  PiaDetector<double> det(c, 3);
  auto video = random_video(rng, 1);
  det.forward(video);
  auto* visual = det.visual();
  ASSERT_NE(visual, nullptr);
  const auto& response = visual->temporal_response();
  const auto& w = visual->conv3d_weight().value;
  const auto& b = visual->conv3d_bias().value;
  const auto& crops = video.groups[0].crops;
  const auto pixel = [&](int t, int y, int x, int ch) -> double {
    if (t < 0 || t >= 5 || y < 0 || y >= kCropSize || x < 0 || x >= kCropSize) return 0.0;
    return crops[static_cast<std::size_t>(t)][(static_cast<std::size_t>(y) * kCropSize + x) * 3 + ch];
  };
  for (int trial = 0; trial < 20; ++trial) {
    const int o = rng.uniform_int(0, c.conv3d_channels - 1);
    const int y = rng.uniform_int(0, kCropSize - 1), x = rng.uniform_int(0, kCropSize - 1);
    double mean = 0.0;
    for (int t = 0; t < 5; ++t) {
      double acc = b(o, 0);
      for (int tap = 0; tap < 3; ++tap) {
        for (int ch = 0; ch < 3; ++ch) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              acc += w(o, (tap * 3 + ch) * 9 + ky * 3 + kx) * pixel(t + tap - 1, y + ky - 1, x + kx - 1, ch);
            }
          }
        }
      }
      mean += acc / 5.0;
    }
    EXPECT_NEAR(response.data(o, y * kCropSize + x), mean, 1e-10);
  }
}

TEST(Detector, TemporalConvolutionBiasGradient) {
  // Each bias moves every pre-activation of the temporal convolution, so the
  // stencil is kept small enough to stay clear of ReLU kinks.
  Rng rng(3);
  PiaDetector<double> det(small_config(), 9);
  const auto video = random_video(rng, 2, Label::kFake);
  const auto loss = [&] { return fake_loss(det.forward(video)); };
  det.params().zero_grad();
  const auto logits = det.forward(video);
  std::array<double, 2> dlogits{};
  fake_loss(logits, &dlogits);
  det.backward(dlogits);
  auto& bias = det.visual()->conv3d_bias();
  const double h = 1e-7;
  for (Eigen::Index i = 0; i < bias.value.size(); ++i) {
    double& w = bias.value.data()[i];
    const double saved = w;
    w = saved + h;
    const double up = loss();
    const Mat<double> up_response = det.visual()->temporal_response().data;
    w = saved - h;
    const double down = loss();
    const bool same_signs =
        ((up_response.array() > 0.0) == (det.visual()->temporal_response().data.array() > 0.0)).all();
    w = saved;
    ASSERT_TRUE(same_signs);
    const double numeric = (up - down) / (2 * h);
    EXPECT_NEAR(bias.grad.data()[i], numeric, 1e-6 * std::max(1.0, std::abs(numeric)));
  }
}

TEST(Detector, InvalidGroupsGetNoAttention) {
  Rng rng(4);
  PiaDetector<double> det(small_config(), 5);
  auto video = random_video(rng, 3);
  video.groups[1].valid = false;
  const auto s = det.score(video);
  ASSERT_EQ(s.attention.size(), 2u);
  for (const auto& head : s.attention) {
    ASSERT_EQ(head.size(), 3u);
    EXPECT_EQ(head[1], 0.0);
    EXPECT_NEAR(head[0] + head[2], 1.0, 1e-12);
  }
  EXPECT_NEAR(s.probability, 1.0 / (1.0 + std::exp(s.logits[0] - s.logits[1])), 1e-12);
  for (auto& g : video.groups) g.valid = false;
  EXPECT_THROW(det.forward(video), EmptySequence);
}

TEST(Detector, AblationParameterCounts) {
  const auto base = small_config();
  const harness::TrainConfig train;
  const auto count = [&](const std::string& name) {
    const auto v = harness::ablation_variant(name, base, train);
    return make_detector<float>(v.model, 0)->params();
  };
  const auto full = count("full").total_count();
  EXPECT_LT(count("w/o_vi").total_count(), full);
  EXPECT_LT(count("w/o_geom").total_count(), full);
  EXPECT_LT(count("w/o_arc").total_count(), full);
  EXPECT_GT(count("w_ph").total_count(), full);
  const auto& frozen = count("w/o_EB0");
  EXPECT_EQ(frozen.total_count(), full);
  EXPECT_LT(frozen.trainable_count(), full);
  EXPECT_EQ(harness::ablation_variant("w/o_arc", base, train).train.lambda, 0.0);
  EXPECT_THROW(harness::ablation_variant("nope", base, train), InvalidConfig);
}

TEST(Detector, CheckpointRoundTrip) {
  Rng rng(6);
  auto det = make_detector<float>(small_config(), 11);
  const auto path = (std::filesystem::temp_directory_path() / "pia_model_test.ckpt").string();
  save_checkpoint(path, *det);
  auto back = load_checkpoint<float>(path);
  EXPECT_EQ(back->config().to_json(), det->config().to_json());
  const auto video = random_video(rng, 2);
  const auto a = det->forward(video);
  const auto b = back->forward(video);
  EXPECT_EQ(a, b);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint<float>(path), CacheError);
}

TEST(Detector, PlainCnnScores) {
  Rng rng(7);
  ModelConfig c = small_config();
  c.architecture = "plain_cnn";
  auto det = make_detector<float>(c, 1);
  const auto s = det->score(random_video(rng, 2));
  EXPECT_TRUE(s.attention.empty());
  EXPECT_GT(s.probability, 0.0);
  EXPECT_LT(s.probability, 1.0);
}

TEST(ModelConfig, JsonRoundTripAndValidation) {
  const auto c = small_config();
  EXPECT_EQ(ModelConfig::from_json(c.to_json()).to_json(), c.to_json());
  EXPECT_THROW(ModelConfig::from_json({{"bogus", 1}}), InvalidConfig);
  auto bad = c;
  bad.use_geometry = bad.use_visual = bad.use_identity = false;
  EXPECT_THROW(bad.validate(), InvalidConfig);
  bad = c;
  bad.heads = 0;
  EXPECT_THROW(bad.validate(), InvalidConfig);
}
