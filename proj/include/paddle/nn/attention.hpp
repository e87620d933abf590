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

#include <cmath>
#include <string>
#include <vector>

#include "paddle/nn/layers.hpp"

namespace paddle::nn {

// Token-wise affine map for sequences stored one token per row: Y = X W^T + b.
template <typename Scalar>
class TokenLinear {
 public:
  TokenLinear() = default;
  TokenLinear(ParameterSet<Scalar>& params, const std::string& name, Eigen::Index in,
              Eigen::Index out, int group) {
    weight_ = params.add(name + ".weight", out, in, group);
    bias_ = params.add(name + ".bias", out, 1, group);
  }

  void initialize(ParameterSet<Scalar>& params, double gain, std::mt19937_64& rng) const {
    orthogonal_init<Scalar>(params.mat(weight_), gain, rng);
    params.mat(bias_).setZero();
  }

  RowMatrix<Scalar> forward(const ParameterSet<Scalar>& params, const RowMatrix<Scalar>& x) const {
    RowMatrix<Scalar> y = x * params.mat(weight_).transpose();
    y.rowwise() += params.mat(bias_).col(0).transpose();
    return y;
  }

  RowMatrix<Scalar> backward(const ParameterSet<Scalar>& params, const RowMatrix<Scalar>& x,
                             const RowMatrix<Scalar>& dy, Vector<Scalar>& grad) const {
    params.view(grad, weight_).noalias() += dy.transpose() * x;
    params.view(grad, bias_).col(0) += dy.colwise().sum().transpose();
    return dy * params.mat(weight_);
  }

 private:
  int weight_ = -1;
  int bias_ = -1;
};

struct AttentionConfig {
  int window = 20;
  int token_dim = 7;
  int embed_dim = 64;
  int heads = 4;
  int blocks = 2;
  int ff_dim = 128;
};

// Pre-norm transformer encoder over a window of observation tokens. Each
// batch column holds one flattened window (token-major); the embedding of the
// newest token after a final layer norm is returned, one column per sample.
template <typename Scalar>
class AttentionEncoder {
  struct BlockParams {
    LayerNorm<Scalar> norm1, norm2;
    TokenLinear<Scalar> query, key, value, proj, ff1, ff2;
  };

  struct BlockCache {
    RowMatrix<Scalar> input;
    typename LayerNorm<Scalar>::Cache norm1;
    RowMatrix<Scalar> z1, q, k, v;
    std::vector<RowMatrix<Scalar>> attn;  // per head, window x window
    RowMatrix<Scalar> mixed;              // concatenated head outputs
    RowMatrix<Scalar> residual;           // after attention residual
    typename LayerNorm<Scalar>::Cache norm2;
    RowMatrix<Scalar> z2, hidden;
  };

  struct SampleCache {
    RowMatrix<Scalar> tokens;
    std::vector<BlockCache> blocks;
    typename LayerNorm<Scalar>::Cache final_norm;
  };

 public:
  struct Cache {
    std::vector<SampleCache> samples;
  };

  AttentionEncoder() = default;
  AttentionEncoder(ParameterSet<Scalar>& params, const std::string& name, AttentionConfig cfg, int group)
      : cfg_(cfg) {
    if (cfg.heads < 1 || cfg.embed_dim % cfg.heads != 0) {
      throw std::invalid_argument("embedding width must be divisible by the head count");
    }
    const int d = cfg.embed_dim;
    input_ = TokenLinear<Scalar>(params, name + ".input", cfg.token_dim, d, group);
    position_ = params.add(name + ".position", cfg.window, d, group);
    for (int b = 0; b < cfg.blocks; ++b) {
      const std::string p = name + ".block" + std::to_string(b);
      BlockParams bp;
      bp.norm1 = LayerNorm<Scalar>(params, p + ".norm1", d, group);
      bp.query = TokenLinear<Scalar>(params, p + ".query", d, d, group);
      bp.key = TokenLinear<Scalar>(params, p + ".key", d, d, group);
      bp.value = TokenLinear<Scalar>(params, p + ".value", d, d, group);
      bp.proj = TokenLinear<Scalar>(params, p + ".proj", d, d, group);
      bp.norm2 = LayerNorm<Scalar>(params, p + ".norm2", d, group);
      bp.ff1 = TokenLinear<Scalar>(params, p + ".ff1", d, cfg.ff_dim, group);
      bp.ff2 = TokenLinear<Scalar>(params, p + ".ff2", cfg.ff_dim, d, group);
      blocks_.push_back(std::move(bp));
    }
    final_norm_ = LayerNorm<Scalar>(params, name + ".final_norm", d, group);
  }

  void initialize(ParameterSet<Scalar>& params, std::mt19937_64& rng) const {
    input_.initialize(params, 1.0, rng);
    std::normal_distribution<double> unit(0.0, 0.02);
    auto pos = params.mat(position_);
    for (Eigen::Index j = 0; j < pos.cols(); ++j)
      for (Eigen::Index i = 0; i < pos.rows(); ++i) pos(i, j) = static_cast<Scalar>(unit(rng));
    for (const auto& b : blocks_) {
      b.norm1.initialize(params);
      b.query.initialize(params, 1.0, rng);
      b.key.initialize(params, 1.0, rng);
      b.value.initialize(params, 1.0, rng);
      b.proj.initialize(params, 1.0 / std::sqrt(2.0 * cfg_.blocks), rng);
      b.norm2.initialize(params);
      b.ff1.initialize(params, 1.0, rng);
      b.ff2.initialize(params, 1.0 / std::sqrt(2.0 * cfg_.blocks), rng);
    }
    final_norm_.initialize(params);
  }

  Eigen::Index in() const { return static_cast<Eigen::Index>(cfg_.window) * cfg_.token_dim; }
  Eigen::Index out() const { return cfg_.embed_dim; }

  Matrix<Scalar> forward(const ParameterSet<Scalar>& params, const Matrix<Scalar>& x, Cache* cache) const {
    const Eigen::Index batch = x.cols();
    Matrix<Scalar> out(cfg_.embed_dim, batch);
    if (cache) cache->samples.resize(static_cast<std::size_t>(batch));
    SampleCache scratch;
    for (Eigen::Index s = 0; s < batch; ++s) {
      SampleCache& sc = cache ? cache->samples[static_cast<std::size_t>(s)] : scratch;
      out.col(s) = forward_sample(params, x.col(s), sc);
    }
    return out;
  }

  // Accumulates parameter gradients; input gradients are not needed.
  void backward(const ParameterSet<Scalar>& params, const Cache& cache, const Matrix<Scalar>& dy,
                Vector<Scalar>& grad) const {
    for (Eigen::Index s = 0; s < dy.cols(); ++s) {
      backward_sample(params, cache.samples[static_cast<std::size_t>(s)], dy.col(s), grad);
    }
  }

 private:
  Vector<Scalar> forward_sample(const ParameterSet<Scalar>& params,
                                const Eigen::Ref<const Vector<Scalar>>& column, SampleCache& sc) const {
    const int T = cfg_.window;
    const int d = cfg_.embed_dim;
    const int dh = d / cfg_.heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));

    sc.tokens = Eigen::Map<const RowMatrix<Scalar>>(column.data(), T, cfg_.token_dim);
    RowMatrix<Scalar> e = input_.forward(params, sc.tokens) + params.mat(position_);
    sc.blocks.resize(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& bp = blocks_[b];
      auto& bc = sc.blocks[b];
      bc.input = e;
      bc.z1 = bp.norm1.forward(params, e, bc.norm1);
      bc.q = bp.query.forward(params, bc.z1);
      bc.k = bp.key.forward(params, bc.z1);
      bc.v = bp.value.forward(params, bc.z1);
      bc.attn.resize(static_cast<std::size_t>(cfg_.heads));
      bc.mixed.resize(T, d);
      for (int h = 0; h < cfg_.heads; ++h) {
        RowMatrix<Scalar> scores = scale * bc.q.middleCols(h * dh, dh) * bc.k.middleCols(h * dh, dh).transpose();
        for (int i = 0; i < T; ++i) {
          const Scalar m = scores.row(i).maxCoeff();
          scores.row(i) = (scores.row(i).array() - m).exp().matrix();
          scores.row(i) /= scores.row(i).sum();
        }
        bc.mixed.middleCols(h * dh, dh) = scores * bc.v.middleCols(h * dh, dh);
        bc.attn[static_cast<std::size_t>(h)] = std::move(scores);
      }
      bc.residual = e + bp.proj.forward(params, bc.mixed);
      bc.z2 = bp.norm2.forward(params, bc.residual, bc.norm2);
      bc.hidden = bp.ff1.forward(params, bc.z2).array().tanh().matrix();
      e = bc.residual + bp.ff2.forward(params, bc.hidden);
    }
    RowMatrix<Scalar> last = e.row(T - 1);
    return final_norm_.forward(params, last, sc.final_norm).row(0).transpose();
  }

  void backward_sample(const ParameterSet<Scalar>& params, const SampleCache& sc,
                       const Eigen::Ref<const Vector<Scalar>>& dy, Vector<Scalar>& grad) const {
    const int T = cfg_.window;
    const int d = cfg_.embed_dim;
    const int dh = d / cfg_.heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));

    RowMatrix<Scalar> dlast = dy.transpose();
    RowMatrix<Scalar> de = RowMatrix<Scalar>::Zero(T, d);
    de.row(T - 1) = final_norm_.backward(params, sc.final_norm, dlast, grad).row(0);

    for (std::size_t b = blocks_.size(); b-- > 0;) {
      const auto& bp = blocks_[b];
      const auto& bc = sc.blocks[b];
      // feed-forward branch
      RowMatrix<Scalar> dhidden = bp.ff2.backward(params, bc.hidden, de, grad);
      dhidden = (dhidden.array() * (Scalar(1) - bc.hidden.array().square())).matrix();
      RowMatrix<Scalar> dz2 = bp.ff1.backward(params, bc.z2, dhidden, grad);
      RowMatrix<Scalar> dres = de + bp.norm2.backward(params, bc.norm2, dz2, grad);
      // attention branch
      RowMatrix<Scalar> dmixed = bp.proj.backward(params, bc.mixed, dres, grad);
      RowMatrix<Scalar> dq(T, d), dk(T, d), dv(T, d);
      for (int h = 0; h < cfg_.heads; ++h) {
        const auto& a = bc.attn[static_cast<std::size_t>(h)];
        const auto dout = dmixed.middleCols(h * dh, dh);
        RowMatrix<Scalar> da = dout * bc.v.middleCols(h * dh, dh).transpose();
        dv.middleCols(h * dh, dh) = a.transpose() * dout;
        RowMatrix<Scalar> ds = a.cwiseProduct(da);
        const Vector<Scalar> rowdot = ds.rowwise().sum();
        ds -= (a.array().colwise() * rowdot.array()).matrix();
        ds *= scale;
        dq.middleCols(h * dh, dh) = ds * bc.k.middleCols(h * dh, dh);
        dk.middleCols(h * dh, dh) = ds.transpose() * bc.q.middleCols(h * dh, dh);
      }
      RowMatrix<Scalar> dz1 = bp.query.backward(params, bc.z1, dq, grad);
      dz1 += bp.key.backward(params, bc.z1, dk, grad);
      dz1 += bp.value.backward(params, bc.z1, dv, grad);
      de = dres + bp.norm1.backward(params, bc.norm1, dz1, grad);
    }
    params.view(grad, position_) += de;
    input_.backward(params, sc.tokens, de, grad);
  }

  AttentionConfig cfg_;
  TokenLinear<Scalar> input_;
  int position_ = -1;
  std::vector<BlockParams> blocks_;
  LayerNorm<Scalar> final_norm_;
};

}  // namespace paddle::nn
