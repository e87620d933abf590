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

#include <Eigen/Core>

#include <span>

namespace paddle::train {

// Generalized advantage estimates for one channel. `values` holds V(s_t) for
// every step plus the bootstrap value of the state after the last step
// (zero for a true terminal).
struct GaeChannel {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;  // advantages + V(s_t), the value target
};

GaeChannel gae(std::span<const double> rewards, const Eigen::VectorXd& values, double gamma, double lambda_gae);

struct AdvantageSet {
  Eigen::VectorXd A_r, A_c;          // raw GAE
  Eigen::VectorXd A_r_bar, A_c_bar;  // batch-normalised, then clamped
  Eigen::VectorXd A_lambda;          // A_r_bar - lambda * A_c_bar
  Eigen::VectorXd returns_r, returns_c;
};

struct AdvantageOptions {
  double gamma = 0.99;
  double lambda_gae = 0.95;
  double clamp = 10.0;  // |normalised advantage| bound, <= 0 disables
};

// (x - mean) / (std + 1e-8) with the population std.
Eigen::VectorXd normalize(const Eigen::VectorXd& x);

// Reward and cost GAE on one batch, normalised over the batch, combined with
// the current multiplier. Value vectors have one entry per step plus the
// bootstrap value.
AdvantageSet dual_gae(std::span<const double> rewards, std::span<const double> costs, const Eigen::VectorXd& V_r,
                      const Eigen::VectorXd& V_c, double lagrange_lambda, const AdvantageOptions& opts = {});

}  // namespace paddle::train
