#pragma once

#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pia/util/random.hpp"

namespace pia::model {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

template <typename S>
struct Param {
  std::string name;
  Mat<S> value;
  Mat<S> grad;
  bool trainable = true;
};

// Owns every parameter of a model in creation order. Addresses stay stable.
template <typename S>
class ParamStore {
 public:
  Param<S>& add(const std::string& name, Eigen::Index rows, Eigen::Index cols, bool trainable = true) {
    for (const auto& p : params_) {
      if (p.name == name) throw std::logic_error("duplicate parameter " + name);
    }
    auto& p = params_.emplace_back();
    p.name = name;
    p.value = Mat<S>::Zero(rows, cols);
    p.grad = Mat<S>::Zero(rows, cols);
    p.trainable = trainable;
    return p;
  }

  std::deque<Param<S>>& all() { return params_; }
  const std::deque<Param<S>>& all() const { return params_; }

  Param<S>* find(const std::string& name) {
    for (auto& p : params_) {
      if (p.name == name) return &p;
    }
    return nullptr;
  }

  void zero_grad() {
    for (auto& p : params_) p.grad.setZero();
  }

  std::size_t trainable_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) {
      if (p.trainable) n += static_cast<std::size_t>(p.value.size());
    }
    return n;
  }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

 private:
  std::deque<Param<S>> params_;
};

// Fills with independent N(0, stddev^2) draws.
template <typename S>
void init_normal(Param<S>& p, Rng& rng, double stddev) {
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<S>(rng.normal() * stddev);
}

}  // namespace pia::model
