#pragma once

#include <string>
#include <vector>

#include "pia/model/tensor.hpp"

namespace pia::model {

// y = x W^T + b for row-major batches x [N, in].
template <typename S>
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore<S>& store, const std::string& name, int in, int out, Rng& rng, double init_scale = 1.0,
         bool trainable = true);

  Mat<S> forward(const Mat<S>& x);
  // Accumulates parameter gradients and returns dL/dx.
  Mat<S> backward(const Mat<S>& dy);

  int in() const { return static_cast<int>(w_->value.cols()); }
  int out() const { return static_cast<int>(w_->value.rows()); }

 private:
  Param<S>* w_ = nullptr;
  Param<S>* b_ = nullptr;
  Mat<S> x_;
};

// Linear layers with ReLU between them (none after the last).
template <typename S>
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore<S>& store, const std::string& name, const std::vector<int>& sizes, Rng& rng,
      double last_init_scale = 1.0);

  Mat<S> forward(const Mat<S>& x);
  Mat<S> backward(const Mat<S>& dy);

 private:
  std::vector<Linear<S>> layers_;
  std::vector<Mat<S>> pre_;  // pre-activation outputs of hidden layers
};

// Image batch in channel-major layout: data [channels, n * height * width],
// column = (image * height + y) * width + x.
template <typename S>
struct FeatureMap {
  Mat<S> data;
  int n = 0;
  int height = 0;
  int width = 0;

  int channels() const { return static_cast<int>(data.rows()); }
};

// Square-kernel 2D convolution with zero padding, computed as im2col + GEMM.
// Weight rows are output channels, columns (in_channel * k + ky) * k + kx.
template <typename S>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParamStore<S>& store, const std::string& name, int in_channels, int out_channels, int kernel, int stride,
         int padding, Rng& rng, bool trainable = true);

  FeatureMap<S> forward(const FeatureMap<S>& x);
  // Returns dL/dx unless need_input_grad is false (then an empty map).
  FeatureMap<S> backward(const FeatureMap<S>& dy, bool need_input_grad = true);

  Param<S>& weight() { return *w_; }
  Param<S>& bias() { return *b_; }

 private:
  Param<S>* w_ = nullptr;
  Param<S>* b_ = nullptr;
  int in_channels_ = 0;
  int kernel_ = 3;
  int stride_ = 1;
  int padding_ = 1;
  int in_h_ = 0;
  int in_w_ = 0;
  int n_ = 0;
  Mat<S> col_;
};

template <typename S>
void relu_inplace(Mat<S>& x) {
  x = x.cwiseMax(S(0));
}

// dy masked by the sign of the forward output.
template <typename S>
Mat<S> relu_backward(const Mat<S>& dy, const Mat<S>& y) {
  return (y.array() > S(0)).select(dy, Mat<S>::Zero(dy.rows(), dy.cols()));
}

// Global average pool: [C, n*H*W] -> [n, C].
template <typename S>
Mat<S> global_average_pool(const FeatureMap<S>& x);
template <typename S>
FeatureMap<S> global_average_pool_backward(const Mat<S>& dy, int height, int width);

}  // namespace pia::model
