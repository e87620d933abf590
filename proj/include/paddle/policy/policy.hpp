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

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "paddle/cmdp/types.hpp"
#include "paddle/nn/attention.hpp"
#include "paddle/nn/layers.hpp"

namespace paddle::policy {

using nn::Matrix;
using nn::RowVector;
using nn::Vector;

enum class EncoderKind { kAttention, kMlp };

// Fixed affine map from raw observations to network features.
struct FeatureScaling {
  cmdp::JointVector neutral{0.75 * std::numbers::pi, 0.75 * std::numbers::pi};
  double angle_scale = 20.0 * std::numbers::pi / 180.0;
  double velocity_scale = 60.0 * std::numbers::pi / 180.0;
  double force_scale = 0.1;
  double moment_scale = 0.01;
  // Adds (sin, cos) of the phase clock as two extra features.
  bool phase_clock = false;
};

struct PolicySpec {
  int window = 20;
  EncoderKind encoder = EncoderKind::kAttention;
  // attention encoder
  int embed_dim = 64;
  int heads = 4;
  int blocks = 2;
  int ff_dim = 128;
  // feed-forward fallback over the flattened window
  std::vector<int> mlp_hidden{256, 128};
  // MLP decoding the final embedding (before the linear output layer)
  std::vector<int> head_hidden{64};
  // Value heads reuse the actor's encoder instead of owning one each.
  bool shared_encoder = false;
  int act_dim = cmdp::kNumJoints;
  // Network actions are in units of action_scale radians per step.
  double action_scale = 3.0 * std::numbers::pi / 180.0;
  double log_std_min = -4.0;
  double log_std_max = 1.0;
  double init_log_std = -1.0;
  FeatureScaling features;

  int obs_dim() const { return 7 + (features.phase_clock ? 2 : 0); }
  int input_dim() const { return window * obs_dim(); }
  void validate() const;

  nlohmann::json to_json() const;
  static PolicySpec from_json(const nlohmann::json& j);
  // Stable hash of the architecture-relevant fields.
  std::string fingerprint() const;
};

template <typename Scalar>
struct ActionDistribution {
  Vector<Scalar> mean;
  Vector<Scalar> std;
};

// Exact diagonal-Gaussian log-density.
template <typename Scalar, typename Derived>
Scalar log_prob(const ActionDistribution<Scalar>& dist, const Eigen::MatrixBase<Derived>& action) {
  const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));
  Scalar total(0);
  for (Eigen::Index i = 0; i < dist.mean.size(); ++i) {
    const Scalar z = (Scalar(action[i]) - dist.mean[i]) / dist.std[i];
    total += Scalar(-0.5) * z * z - std::log(dist.std[i]) - half_log_2pi;
  }
  return total;
}

// Column-wise log-density for a batch: mean and actions are act_dim x batch.
template <typename Scalar>
RowVector<Scalar> batch_log_prob(const Matrix<Scalar>& mean, const Vector<Scalar>& log_std,
                                 const Matrix<Scalar>& actions) {
  const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * std::numbers::pi));
  const Vector<Scalar> inv_std = (-log_std.array()).exp();
  const Matrix<Scalar> z = ((actions - mean).array().colwise() * inv_std.array()).matrix();
  RowVector<Scalar> out = Scalar(-0.5) * z.colwise().squaredNorm();
  out.array() -= log_std.sum() + Scalar(mean.rows()) * half_log_2pi;
  return out;
}

// Feature vector of one observation (length spec.obs_dim()).
template <typename Scalar>
Vector<Scalar> observation_features(const PolicySpec& spec, const cmdp::Observation& obs) {
  if (!obs.is_finite()) throw std::invalid_argument("non-finite observation");
  const auto& f = spec.features;
  Vector<Scalar> out(spec.obs_dim());
  out[0] = Scalar((obs.joint_angles[0] - f.neutral[0]) / f.angle_scale);
  out[1] = Scalar((obs.joint_angles[1] - f.neutral[1]) / f.angle_scale);
  out[2] = Scalar(obs.joint_velocities[0] / f.velocity_scale);
  out[3] = Scalar(obs.joint_velocities[1] / f.velocity_scale);
  out[4] = Scalar(obs.sensed_forces[0] / f.force_scale);
  out[5] = Scalar(obs.sensed_forces[1] / f.force_scale);
  out[6] = Scalar(obs.sensed_forces[2] / f.moment_scale);
  if (f.phase_clock) {
    const double phase = obs.phase_clock.value_or(0.0);
    out[7] = Scalar(std::sin(2.0 * std::numbers::pi * phase));
    out[8] = Scalar(std::cos(2.0 * std::numbers::pi * phase));
  }
  return out;
}

// Flattened window ending at history[t], oldest token first; indices before
// the start of the history repeat history[0].
template <typename Scalar>
Vector<Scalar> encode_window(const PolicySpec& spec, std::span<const cmdp::Observation> history,
                             std::size_t t) {
  if (t >= history.size()) throw std::out_of_range("window end past history");
  const int od = spec.obs_dim();
  Vector<Scalar> out(spec.input_dim());
  for (int k = 0; k < spec.window; ++k) {
    const long long idx = static_cast<long long>(t) - (spec.window - 1) + k;
    const auto& obs = history[static_cast<std::size_t>(std::max<long long>(idx, 0))];
    out.segment(static_cast<Eigen::Index>(k) * od, od) = observation_features<Scalar>(spec, obs);
  }
  return out;
}

// Gaussian policy with reward and cost value heads over an observation window.
template <typename Scalar>
class ActorCritic {
  using Encoder = std::variant<nn::Mlp<Scalar>, nn::AttentionEncoder<Scalar>>;
  using EncoderCache = std::variant<typename nn::Mlp<Scalar>::Cache, typename nn::AttentionEncoder<Scalar>::Cache>;

 public:
  enum Group : int { kActorGroup = 0, kRewardCriticGroup = 1, kCostCriticGroup = 2 };

  struct Output {
    Matrix<Scalar> mean;       // act_dim x batch
    Vector<Scalar> log_std;    // act_dim, clamped
    RowVector<Scalar> value_r; // batch
    RowVector<Scalar> value_c; // batch
  };

  // Loss gradients with respect to the outputs; empty members mean zero.
  struct OutputGrad {
    Matrix<Scalar> mean;
    Vector<Scalar> log_std;
    RowVector<Scalar> value_r;
    RowVector<Scalar> value_c;
  };

  struct Tape {
    std::vector<EncoderCache> encoders;
    std::vector<Matrix<Scalar>> embeddings;
    typename nn::Mlp<Scalar>::Cache actor, value_r, value_c;
  };

  ActorCritic() = default;

  ActorCritic(PolicySpec spec, std::uint64_t init_seed) : spec_(std::move(spec)) {
    spec_.validate();
    const int towers = spec_.shared_encoder ? 1 : 3;
    for (int k = 0; k < towers; ++k) {
      const int group = spec_.shared_encoder ? 0 : k;
      const std::string name = k == 0 ? "actor.encoder" : (k == 1 ? "value_r.encoder" : "value_c.encoder");
      if (spec_.encoder == EncoderKind::kMlp) {
        encoders_.emplace_back(nn::Mlp<Scalar>(params_, name, spec_.input_dim(), spec_.mlp_hidden, true, group));
      } else {
        nn::AttentionConfig cfg{spec_.window, spec_.obs_dim(), spec_.embed_dim, spec_.heads, spec_.blocks,
                                spec_.ff_dim};
        encoders_.emplace_back(nn::AttentionEncoder<Scalar>(params_, name, cfg, group));
      }
    }
    const Eigen::Index emb = embedding_dim();
    auto head_sizes = [&](int out) {
      std::vector<int> sizes = spec_.head_hidden;
      sizes.push_back(out);
      return sizes;
    };
    actor_head_ = nn::Mlp<Scalar>(params_, "actor.head", emb, head_sizes(spec_.act_dim), false, kActorGroup);
    log_std_ = params_.add("actor.log_std", spec_.act_dim, 1, kActorGroup);
    value_r_head_ = nn::Mlp<Scalar>(params_, "value_r.head", emb, head_sizes(1), false,
                                    spec_.shared_encoder ? 0 : kRewardCriticGroup);
    value_c_head_ = nn::Mlp<Scalar>(params_, "value_c.head", emb, head_sizes(1), false,
                                    spec_.shared_encoder ? 0 : kCostCriticGroup);
    initialize(init_seed);
  }

  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double hidden_gain = std::sqrt(2.0);
    for (const auto& enc : encoders_) {
      std::visit(
          [&](const auto& e) {
            if constexpr (std::is_same_v<std::decay_t<decltype(e)>, nn::Mlp<Scalar>>) {
              e.initialize(params_, hidden_gain, hidden_gain, rng);
            } else {
              e.initialize(params_, rng);
            }
          },
          enc);
    }
    actor_head_.initialize(params_, hidden_gain, 0.0, rng);
    value_r_head_.initialize(params_, hidden_gain, 1.0, rng);
    value_c_head_.initialize(params_, hidden_gain, 1.0, rng);
    params_.mat(log_std_).setConstant(Scalar(spec_.init_log_std));
  }

  Output forward(const Matrix<Scalar>& inputs, Tape* tape = nullptr) const {
    if (inputs.rows() != spec_.input_dim()) {
      throw std::invalid_argument("policy input has " + std::to_string(inputs.rows()) + " rows, expected " +
                                  std::to_string(spec_.input_dim()));
    }
    if (!inputs.allFinite()) throw std::invalid_argument("non-finite policy input");
    std::vector<Matrix<Scalar>> embeddings;
    if (tape) tape->encoders.clear();
    for (const auto& enc : encoders_) {
      std::visit(
          [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            typename E::Cache cache;
            embeddings.push_back(e.forward(params_, inputs, tape ? &cache : nullptr));
            if (tape) tape->encoders.emplace_back(std::move(cache));
          },
          enc);
    }
    Output out;
    out.mean = actor_head_.forward(params_, embeddings[0], tape ? &tape->actor : nullptr);
    out.value_r = value_r_head_.forward(params_, embeddings[tower(kRewardCriticGroup)],
                                        tape ? &tape->value_r : nullptr);
    out.value_c = value_c_head_.forward(params_, embeddings[tower(kCostCriticGroup)],
                                        tape ? &tape->value_c : nullptr);
    out.log_std = params_.mat(log_std_).col(0).cwiseMax(Scalar(spec_.log_std_min)).cwiseMin(Scalar(spec_.log_std_max));
    if (tape) tape->embeddings = std::move(embeddings);
    return out;
  }

  void backward(const Tape& tape, const OutputGrad& g, Vector<Scalar>& grad) const {
    if (grad.size() != params_.size()) grad = params_.zeros();
    std::vector<Matrix<Scalar>> demb;
    for (const auto& e : tape.embeddings) demb.push_back(Matrix<Scalar>::Zero(e.rows(), e.cols()));
    if (g.mean.size()) demb[0] += actor_head_.backward(params_, tape.actor, g.mean, grad);
    if (g.value_r.size()) {
      demb[tower(kRewardCriticGroup)] += value_r_head_.backward(params_, tape.value_r, g.value_r, grad);
    }
    if (g.value_c.size()) {
      demb[tower(kCostCriticGroup)] += value_c_head_.backward(params_, tape.value_c, g.value_c, grad);
    }
    if (g.log_std.size()) {
      const auto raw = params_.mat(log_std_).col(0);
      auto dst = params_.view(grad, log_std_).col(0);
      for (Eigen::Index i = 0; i < raw.size(); ++i) {
        if (raw[i] >= Scalar(spec_.log_std_min) && raw[i] <= Scalar(spec_.log_std_max)) dst[i] += g.log_std[i];
      }
    }
    for (std::size_t k = 0; k < encoders_.size(); ++k) {
      if (demb[k].isZero(0)) continue;
      std::visit(
          [&](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            const auto& cache = std::get<typename E::Cache>(tape.encoders[k]);
            e.backward(params_, cache, demb[k], grad);
          },
          encoders_[k]);
    }
  }

  ActionDistribution<Scalar> distribution(const Vector<Scalar>& window) const {
    const Output out = forward(window);
    return {out.mean.col(0), out.log_std.array().exp().matrix()};
  }

  Eigen::Index embedding_dim() const {
    return spec_.encoder == EncoderKind::kMlp
               ? (spec_.mlp_hidden.empty() ? spec_.input_dim() : spec_.mlp_hidden.back())
               : spec_.embed_dim;
  }

  const PolicySpec& spec() const { return spec_; }
  nn::ParameterSet<Scalar>& params() { return params_; }
  const nn::ParameterSet<Scalar>& params() const { return params_; }
  Eigen::Index num_params() const { return params_.size(); }
  int log_std_block() const { return log_std_; }

  // Flat index range [begin, end) of every block in a clipping group.
  std::vector<const nn::ParamBlock*> group_blocks(int group) const {
    std::vector<const nn::ParamBlock*> out;
    for (const auto& b : params_.blocks()) {
      if (b.group == group) out.push_back(&b);
    }
    return out;
  }

 private:
  std::size_t tower(int group) const { return spec_.shared_encoder ? 0 : static_cast<std::size_t>(group); }

  PolicySpec spec_;
  nn::ParameterSet<Scalar> params_;
  std::vector<Encoder> encoders_;
  nn::Mlp<Scalar> actor_head_, value_r_head_, value_c_head_;
  int log_std_ = -1;
};

// Same architecture with parameters converted to another scalar type.
template <typename To, typename From>
ActorCritic<To> cast_policy(const ActorCritic<From>& src) {
  ActorCritic<To> out(src.spec(), 0);
  out.params().values() = src.params().values().template cast<To>();
  return out;
}

}  // namespace paddle::policy
