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

#include "paddle/train/gae.hpp"

#include <cmath>
#include <stdexcept>

namespace paddle::train {

GaeChannel gae(std::span<const double> rewards, const Eigen::VectorXd& values, double gamma, double lambda_gae) {
  const auto n = static_cast<Eigen::Index>(rewards.size());
  if (values.size() != n + 1) throw std::invalid_argument("value estimates not aligned with trajectory");
  GaeChannel out;
  out.advantages.resize(n);
  double acc = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double delta = rewards[static_cast<std::size_t>(t)] + gamma * values[t + 1] - values[t];
    acc = delta + gamma * lambda_gae * acc;
    out.advantages[t] = acc;
  }
  out.returns = out.advantages + values.head(n);
  return out;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& x) {
  if (x.size() == 0) return x;
  const double mean = x.mean();
  const Eigen::ArrayXd centred = x.array() - mean;
  const double std = std::sqrt(centred.square().mean());
  return (centred / (std + 1e-8)).matrix();
}

AdvantageSet dual_gae(std::span<const double> rewards, std::span<const double> costs, const Eigen::VectorXd& V_r,
                      const Eigen::VectorXd& V_c, double lagrange_lambda, const AdvantageOptions& opts) {
  if (rewards.size() != costs.size()) throw std::invalid_argument("reward and cost lengths differ");
  if (rewards.empty()) throw std::invalid_argument("empty trajectory");
  auto r = gae(rewards, V_r, opts.gamma, opts.lambda_gae);
  auto c = gae(costs, V_c, opts.gamma, opts.lambda_gae);
  AdvantageSet s;
  s.A_r = std::move(r.advantages);
  s.A_c = std::move(c.advantages);
  s.returns_r = std::move(r.returns);
  s.returns_c = std::move(c.returns);
  s.A_r_bar = normalize(s.A_r);
  s.A_c_bar = normalize(s.A_c);
  if (opts.clamp > 0.0) {
    s.A_r_bar = s.A_r_bar.cwiseMax(-opts.clamp).cwiseMin(opts.clamp);
    s.A_c_bar = s.A_c_bar.cwiseMax(-opts.clamp).cwiseMin(opts.clamp);
  }
  s.A_lambda = s.A_r_bar - lagrange_lambda * s.A_c_bar;
  return s;
}

}  // namespace paddle::train
