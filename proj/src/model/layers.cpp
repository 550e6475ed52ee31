#include "pia/model/layers.hpp"

#include <cmath>

namespace pia::model {

template <typename S>
Linear<S>::Linear(ParamStore<S>& store, const std::string& name, int in, int out, Rng& rng, double init_scale,
                  bool trainable) {
  w_ = &store.add(name + ".weight", out, in, trainable);
  b_ = &store.add(name + ".bias", out, 1, trainable);
  init_normal(*w_, rng, init_scale * std::sqrt(2.0 / in));
}

template <typename S>
Mat<S> Linear<S>::forward(const Mat<S>& x) {
  x_ = x;
  Mat<S> y = x * w_->value.transpose();
  y.rowwise() += b_->value.col(0).transpose();
  return y;
}

template <typename S>
Mat<S> Linear<S>::backward(const Mat<S>& dy) {
  if (w_->trainable) {
    w_->grad.noalias() += dy.transpose() * x_;
    b_->grad.col(0) += dy.colwise().sum().transpose();
  }
  return dy * w_->value;
}

template <typename S>
Mlp<S>::Mlp(ParamStore<S>& store, const std::string& name, const std::vector<int>& sizes, Rng& rng,
            double last_init_scale) {
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const bool last = i + 2 == sizes.size();
    layers_.emplace_back(store, name + "." + std::to_string(i), sizes[i], sizes[i + 1], rng,
                         last ? last_init_scale : 1.0);
  }
}

template <typename S>
Mat<S> Mlp<S>::forward(const Mat<S>& x) {
  pre_.clear();
  Mat<S> h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) {
      relu_inplace(h);
      pre_.push_back(h);
    }
  }
  return h;
}

template <typename S>
Mat<S> Mlp<S>::backward(const Mat<S>& dy) {
  Mat<S> g = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (i + 1 < layers_.size()) g = relu_backward(g, pre_[i]);
    g = layers_[i].backward(g);
  }
  return g;
}

template <typename S>
Conv2d<S>::Conv2d(ParamStore<S>& store, const std::string& name, int in_channels, int out_channels, int kernel,
                  int stride, int padding, Rng& rng, bool trainable)
    : in_channels_(in_channels), kernel_(kernel), stride_(stride), padding_(padding) {
  const int fan_in = in_channels * kernel * kernel;
  w_ = &store.add(name + ".weight", out_channels, fan_in, trainable);
  b_ = &store.add(name + ".bias", out_channels, 1, trainable);
  init_normal(*w_, rng, std::sqrt(2.0 / fan_in));
}

template <typename S>
FeatureMap<S> Conv2d<S>::forward(const FeatureMap<S>& x) {
  const int k = kernel_;
  n_ = x.n;
  in_h_ = x.height;
  in_w_ = x.width;
  const int oh = (in_h_ + 2 * padding_ - k) / stride_ + 1;
  const int ow = (in_w_ + 2 * padding_ - k) / stride_ + 1;
  const Eigen::Index in_plane = static_cast<Eigen::Index>(in_h_) * in_w_;
  const Eigen::Index out_plane = static_cast<Eigen::Index>(oh) * ow;

  col_.resize(static_cast<Eigen::Index>(in_channels_) * k * k, n_ * out_plane);
  for (int c = 0; c < in_channels_; ++c) {
    const S* src_channel = x.data.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        S* dst = col_.row((static_cast<Eigen::Index>(c) * k + ky) * k + kx).data();
        for (int img = 0; img < n_; ++img) {
          const S* src = src_channel + img * in_plane;
          for (int oy = 0; oy < oh; ++oy) {
            S* out = dst + img * out_plane + static_cast<Eigen::Index>(oy) * ow;
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= in_h_) {
              std::fill(out, out + ow, S(0));
              continue;
            }
            const S* row = src + static_cast<Eigen::Index>(iy) * in_w_;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride_ - padding_ + kx;
              out[ox] = (ix >= 0 && ix < in_w_) ? row[ix] : S(0);
            }
          }
        }
      }
    }
  }

  FeatureMap<S> y;
  y.n = n_;
  y.height = oh;
  y.width = ow;
  y.data.noalias() = w_->value * col_;
  y.data.colwise() += b_->value.col(0);
  return y;
}

template <typename S>
FeatureMap<S> Conv2d<S>::backward(const FeatureMap<S>& dy, bool need_input_grad) {
  if (w_->trainable) {
    w_->grad.noalias() += dy.data * col_.transpose();
    b_->grad.col(0) += dy.data.rowwise().sum();
  }
  FeatureMap<S> dx;
  if (!need_input_grad) return dx;

  const int k = kernel_;
  const int oh = dy.height;
  const int ow = dy.width;
  const Eigen::Index in_plane = static_cast<Eigen::Index>(in_h_) * in_w_;
  const Eigen::Index out_plane = static_cast<Eigen::Index>(oh) * ow;
  const Mat<S> dcol = w_->value.transpose() * dy.data;

  dx.n = n_;
  dx.height = in_h_;
  dx.width = in_w_;
  dx.data = Mat<S>::Zero(in_channels_, n_ * in_plane);
  for (int c = 0; c < in_channels_; ++c) {
    S* dst_channel = dx.data.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const S* src = dcol.row((static_cast<Eigen::Index>(c) * k + ky) * k + kx).data();
        for (int img = 0; img < n_; ++img) {
          S* dst = dst_channel + img * in_plane;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride_ - padding_ + ky;
            if (iy < 0 || iy >= in_h_) continue;
            const S* g = src + img * out_plane + static_cast<Eigen::Index>(oy) * ow;
            S* row = dst + static_cast<Eigen::Index>(iy) * in_w_;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride_ - padding_ + kx;
              if (ix >= 0 && ix < in_w_) row[ix] += g[ox];
            }
          }
        }
      }
    }
  }
  return dx;
}

template <typename S>
Mat<S> global_average_pool(const FeatureMap<S>& x) {
  const Eigen::Index plane = static_cast<Eigen::Index>(x.height) * x.width;
  Mat<S> out(x.n, x.channels());
  for (int img = 0; img < x.n; ++img) {
    out.row(img) = x.data.middleCols(img * plane, plane).rowwise().mean().transpose();
  }
  return out;
}

template <typename S>
FeatureMap<S> global_average_pool_backward(const Mat<S>& dy, int height, int width) {
  const Eigen::Index plane = static_cast<Eigen::Index>(height) * width;
  FeatureMap<S> dx;
  dx.n = static_cast<int>(dy.rows());
  dx.height = height;
  dx.width = width;
  dx.data.resize(dy.cols(), dx.n * plane);
  for (int img = 0; img < dx.n; ++img) {
    for (Eigen::Index c = 0; c < dy.cols(); ++c) {
      dx.data.row(c).segment(img * plane, plane).setConstant(dy(img, c) / static_cast<S>(plane));
    }
  }
  return dx;
}

template class Linear<float>;
template class Linear<double>;
template class Mlp<float>;
template class Mlp<double>;
template class Conv2d<float>;
template class Conv2d<double>;
template Mat<float> global_average_pool(const FeatureMap<float>&);
template Mat<double> global_average_pool(const FeatureMap<double>&);
template FeatureMap<float> global_average_pool_backward(const Mat<float>&, int, int);
template FeatureMap<double> global_average_pool_backward(const Mat<double>&, int, int);

}  // namespace pia::model
