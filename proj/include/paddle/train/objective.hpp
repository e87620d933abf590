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
#include <numbers>
#include <vector>

#include "paddle/policy/policy.hpp"
#include "paddle/train/surrogate.hpp"

namespace paddle::train {

using nn::Matrix;
using nn::RowVector;

struct LossCoefficients {
  double value = 0.5;     // per value head
  double entropy = 1e-3;  // bonus weight
  double actor = 1.0;
};

// One minibatch in network units (actions divided by the action scale).
template <typename Scalar>
struct MinibatchData {
  Matrix<Scalar> inputs;   // input_dim x B
  Matrix<Scalar> actions;  // act_dim x B
  Vec<Scalar> logp_old;
  Vec<Scalar> A_lambda;
  Eigen::VectorXd A_r, A_c;  // raw GAE
  Vec<Scalar> returns_r, returns_c;
  std::vector<cmdp::CycleSegment> segments;
  int episode = 0;

  Eigen::Index size() const { return inputs.cols(); }
};

template <typename Scalar>
struct LossBreakdown {
  Scalar total = Scalar(0);
  ActorLossResult<Scalar> actor;
  Scalar value_r = Scalar(0);  // 0.5 mean (V - target)^2, before the coefficient
  Scalar value_c = Scalar(0);
  Scalar entropy = Scalar(0);
};

// total = c_a L_actor + c_v (L_Vr + L_Vc) - c_e H[pi]. When `grad` is given
// it receives d total / d params.
template <typename Scalar>
LossBreakdown<Scalar> minibatch_objective(const policy::ActorCritic<Scalar>& net, const MinibatchData<Scalar>& mb,
                                          const ClipSchedule& sched, const VariantRules& rules,
                                          const LossCoefficients& coef, CycleLogClip mode,
                                          Vec<Scalar>* grad = nullptr) {
  using Net = policy::ActorCritic<Scalar>;
  typename Net::Tape tape;
  const auto out = net.forward(mb.inputs, grad ? &tape : nullptr);
  const RowVector<Scalar> logp = policy::batch_log_prob<Scalar>(out.mean, out.log_std, mb.actions);

  ActorBatch<Scalar> ab;
  ab.log_ratio = logp.transpose() - mb.logp_old;
  ab.A_lambda = mb.A_lambda;
  ab.A_r = mb.A_r;
  ab.A_c = mb.A_c;
  ab.segments = mb.segments;
  ab.episode = mb.episode;

  LossBreakdown<Scalar> res;
  res.actor = actor_loss<Scalar>(ab, sched, rules, mode);
  const Eigen::Index b = mb.size();
  const RowVector<Scalar> err_r = out.value_r - mb.returns_r.transpose();
  const RowVector<Scalar> err_c = out.value_c - mb.returns_c.transpose();
  res.value_r = Scalar(0.5) * err_r.squaredNorm() / Scalar(b);
  res.value_c = Scalar(0.5) * err_c.squaredNorm() / Scalar(b);
  const Scalar half_log_2pi_e = Scalar(0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e));
  res.entropy = out.log_std.sum() + Scalar(out.log_std.size()) * half_log_2pi_e;
  const Scalar ca(coef.actor), cv(coef.value), ce(coef.entropy);
  res.total = ca * res.actor.loss + cv * (res.value_r + res.value_c) - ce * res.entropy;

  if (grad) {
    typename Net::OutputGrad g;
    // d logp / d mean = (a - mu) / sigma^2, d logp / d log_std = z^2 - 1
    const Vec<Scalar> inv_var = (Scalar(-2) * out.log_std.array()).exp();
    const Matrix<Scalar> diff = mb.actions - out.mean;
    const RowVector<Scalar> dlogp = ca * res.actor.grad.transpose();
    g.mean = (diff.array().colwise() * inv_var.array()).matrix();
    g.mean.array().rowwise() *= dlogp.array();
    const Matrix<Scalar> z2 = (diff.array().square().colwise() * inv_var.array()).matrix();
    g.log_std = (z2.array() - Scalar(1)).matrix() * dlogp.transpose();
    g.log_std.array() -= ce;
    g.value_r = cv * err_r / Scalar(b);
    g.value_c = cv * err_c / Scalar(b);
    *grad = net.params().zeros();
    net.backward(tape, g, *grad);
  }
  return res;
}

}  // namespace paddle::train
