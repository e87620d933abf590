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

#include <algorithm>
#include <cmath>
#include <vector>

#include "paddle/nn/parameters.hpp"

namespace paddle::nn {

template <typename Scalar>
struct AdamState {
  Vector<Scalar> m;
  Vector<Scalar> v;
  long long step = 0;
};

template <typename Scalar>
class Adam {
 public:
  struct Options {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // Per-group global-norm clip; <= 0 disables.
    double max_grad_norm = 0.5;
  };

  Adam() = default;
  Adam(Eigen::Index size, Options opts) : opts_(opts) { reset(size); }

  void reset(Eigen::Index size) {
    state_.m = Vector<Scalar>::Zero(size);
    state_.v = Vector<Scalar>::Zero(size);
    state_.step = 0;
  }

  // Clips each parameter group's gradient to max_grad_norm (in place), then
  // applies one Adam step.
  void step(ParameterSet<Scalar>& params, Vector<Scalar>& grad) {
    clip_by_group(params, grad);
    ++state_.step;
    const Scalar b1 = Scalar(opts_.beta1), b2 = Scalar(opts_.beta2);
    state_.m = b1 * state_.m + (Scalar(1) - b1) * grad;
    state_.v = b2 * state_.v + (Scalar(1) - b2) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - Scalar(std::pow(opts_.beta1, static_cast<double>(state_.step)));
    const Scalar c2 = Scalar(1) - Scalar(std::pow(opts_.beta2, static_cast<double>(state_.step)));
    const Scalar lr = Scalar(opts_.learning_rate);
    const Scalar eps = Scalar(opts_.epsilon);
    params.values().array() -=
        lr * (state_.m.array() / c1) / ((state_.v.array() / c2).sqrt() + eps);
  }

  void clip_by_group(const ParameterSet<Scalar>& params, Vector<Scalar>& grad) const {
    if (opts_.max_grad_norm <= 0.0) return;
    int groups = 0;
    for (const auto& b : params.blocks()) groups = std::max(groups, b.group + 1);
    std::vector<double> sq(static_cast<std::size_t>(groups), 0.0);
    for (const auto& b : params.blocks()) {
      sq[static_cast<std::size_t>(b.group)] +=
          static_cast<double>(grad.segment(b.offset, b.size()).squaredNorm());
    }
    for (const auto& b : params.blocks()) {
      const double norm = std::sqrt(sq[static_cast<std::size_t>(b.group)]);
      if (norm > opts_.max_grad_norm) {
        grad.segment(b.offset, b.size()) *= Scalar(opts_.max_grad_norm / (norm + 1e-12));
      }
    }
  }

  Options& options() { return opts_; }
  const Options& options() const { return opts_; }
  AdamState<Scalar>& state() { return state_; }
  const AdamState<Scalar>& state() const { return state_; }

 private:
  Options opts_;
  AdamState<Scalar> state_;
};

}  // namespace paddle::nn
