/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <string>
#include <vector>

#include "paddle/nn/parameters.hpp"

namespace paddle::nn {

// y = W x + b over a batch stored column-wise (features x batch).
template <typename Scalar>
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet<Scalar>& params, const std::string& name, Eigen::Index in, Eigen::Index out,
         int group)
      : in_(in), out_(out) {
    weight_ = params.add(name + ".weight", out, in, group);
    bias_ = params.add(name + ".bias", out, 1, group);
  }

  void initialize(ParameterSet<Scalar>& params, double gain, std::mt19937_64& rng) const {
    orthogonal_init<Scalar>(params.mat(weight_), gain, rng);
    params.mat(bias_).setZero();
  }

  Matrix<Scalar> forward(const ParameterSet<Scalar>& params, const Matrix<Scalar>& x) const {
    Matrix<Scalar> y = params.mat(weight_) * x;
    y.colwise() += params.mat(bias_).col(0);
    return y;
  }

  // Accumulates dW, db into `grad`; returns dL/dx.
  Matrix<Scalar> backward(const ParameterSet<Scalar>& params, const Matrix<Scalar>& x,
                          const Matrix<Scalar>& dy, Vector<Scalar>& grad) const {
    params.view(grad, weight_).noalias() += dy * x.transpose();
    params.view(grad, bias_).col(0) += dy.rowwise().sum();
    return params.mat(weight_).transpose() * dy;
  }

  Eigen::Index in() const { return in_; }
  Eigen::Index out() const { return out_; }
  int weight_id() const { return weight_; }
  int bias_id() const { return bias_; }

 private:
  Eigen::Index in_ = 0;
  Eigen::Index out_ = 0;
  int weight_ = -1;
  int bias_ = -1;
};

// Stack of Linear layers with tanh between them (and after the last one when
// `activate_last`).
template <typename Scalar>
class Mlp {
 public:
  struct Cache {
    std::vector<Matrix<Scalar>> inputs;   // input to each layer
    std::vector<Matrix<Scalar>> outputs;  // post-activation output of each layer
  };

  Mlp() = default;
  Mlp(ParameterSet<Scalar>& params, const std::string& name, Eigen::Index in,
      const std::vector<int>& sizes, bool activate_last, int group)
      : activate_last_(activate_last) {
    Eigen::Index prev = in;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      layers_.emplace_back(params, name + "." + std::to_string(i), prev, sizes[i], group);
      prev = sizes[i];
    }
    out_ = prev;
  }

  void initialize(ParameterSet<Scalar>& params, double hidden_gain, double last_gain,
                  std::mt19937_64& rng) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i].initialize(params, i + 1 == layers_.size() ? last_gain : hidden_gain, rng);
    }
  }

  Matrix<Scalar> forward(const ParameterSet<Scalar>& params, const Matrix<Scalar>& x, Cache* cache) const {
    Matrix<Scalar> h = x;
    if (cache) {
      cache->inputs.clear();
      cache->outputs.clear();
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix<Scalar> y = layers_[i].forward(params, h);
      if (activated(i)) y = y.array().tanh().matrix();
      if (cache) {
        cache->inputs.push_back(std::move(h));
        cache->outputs.push_back(y);
      }
      h = std::move(y);
    }
    return h;
  }

  Matrix<Scalar> backward(const ParameterSet<Scalar>& params, const Cache& cache,
                          const Matrix<Scalar>& dy, Vector<Scalar>& grad) const {
    Matrix<Scalar> d = dy;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      if (activated(k)) {
        d = (d.array() * (Scalar(1) - cache.outputs[k].array().square())).matrix();
      }
      d = layers_[k].backward(params, cache.inputs[k], d, grad);
    }
    return d;
  }

  Eigen::Index out() const { return out_; }
  const std::vector<Linear<Scalar>>& layers() const { return layers_; }

 private:
  bool activated(std::size_t i) const { return i + 1 < layers_.size() || activate_last_; }

  std::vector<Linear<Scalar>> layers_;
  Eigen::Index out_ = 0;
  bool activate_last_ = false;
};

// Row-wise layer normalisation with learned gain and bias.
template <typename Scalar>
class LayerNorm {
 public:
  struct Cache {
    RowMatrix<Scalar> normalized;
    Vector<Scalar> inv_std;
  };

  LayerNorm() = default;
  LayerNorm(ParameterSet<Scalar>& params, const std::string& name, Eigen::Index dim, int group)
      : dim_(dim) {
    gain_ = params.add(name + ".gain", dim, 1, group);
    bias_ = params.add(name + ".bias", dim, 1, group);
  }

  void initialize(ParameterSet<Scalar>& params) const {
    params.mat(gain_).setOnes();
    params.mat(bias_).setZero();
  }

  RowMatrix<Scalar> forward(const ParameterSet<Scalar>& params, const RowMatrix<Scalar>& x,
                            Cache& cache) const {
    const Eigen::Index n = x.rows();
    cache.normalized.resize(n, dim_);
    cache.inv_std.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar mean = x.row(i).mean();
      const auto centered = (x.row(i).array() - mean).matrix();
      const Scalar var = centered.squaredNorm() / Scalar(dim_);
      const Scalar inv = Scalar(1) / std::sqrt(var + kEps);
      cache.inv_std[i] = inv;
      cache.normalized.row(i) = centered * inv;
    }
    RowMatrix<Scalar> y = cache.normalized;
    y.array().rowwise() *= params.mat(gain_).col(0).transpose().array();
    y.rowwise() += params.mat(bias_).col(0).transpose();
    return y;
  }

  RowMatrix<Scalar> backward(const ParameterSet<Scalar>& params, const Cache& cache,
                             const RowMatrix<Scalar>& dy, Vector<Scalar>& grad) const {
    params.view(grad, gain_).col(0) +=
        (dy.array() * cache.normalized.array()).colwise().sum().transpose().matrix();
    params.view(grad, bias_).col(0) += dy.colwise().sum().transpose();
    RowMatrix<Scalar> dx(dy.rows(), dim_);
    const auto g = params.mat(gain_).col(0).transpose().array();
    for (Eigen::Index i = 0; i < dy.rows(); ++i) {
      const RowVector<Scalar> dn = (dy.row(i).array() * g).matrix();
      const Scalar mean_dn = dn.mean();
      const Scalar mean_dn_n = dn.dot(cache.normalized.row(i)) / Scalar(dim_);
      dx.row(i) = cache.inv_std[i] *
                  (dn.array() - mean_dn - cache.normalized.row(i).array() * mean_dn_n).matrix();
    }
    return dx;
  }

 private:
  static constexpr Scalar kEps = Scalar(1e-5);
  Eigen::Index dim_ = 0;
  int gain_ = -1;
  int bias_ = -1;
};

}  // namespace paddle::nn
