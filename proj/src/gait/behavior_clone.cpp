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

#include "paddle/gait/behavior_clone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "paddle/train/trainer.hpp"

namespace paddle::gait {

BcDataset make_bc_dataset(const policy::PolicySpec& spec, const DemoSet& demos) {
  if (demos.records.empty()) throw std::invalid_argument("empty demo set");
  Eigen::Index total = 0;
  for (const auto& r : demos.records) total += static_cast<Eigen::Index>(r.trajectory.size());
  BcDataset ds;
  ds.inputs.resize(spec.input_dim(), total);
  ds.actions.resize(spec.act_dim, total);
  Eigen::Index col = 0;
  for (const auto& r : demos.records) {
    std::vector<cmdp::Observation> history;
    for (const auto& tr : r.trajectory.transitions) {
      if (tr.obs.phase_clock.has_value() != spec.features.phase_clock) {
        throw std::invalid_argument("demo observations do not match the policy input");
      }
      history.push_back(tr.obs);
    }
    for (std::size_t t = 0; t < history.size(); ++t, ++col) {
      ds.inputs.col(col) = policy::encode_window<float>(spec, history, t);
      const auto& a = r.trajectory.transitions[t].action.joint_deltas;
      for (int i = 0; i < spec.act_dim; ++i) ds.actions(i, col) = static_cast<float>(a[i] / spec.action_scale);
    }
  }
  return ds;
}

namespace {

double full_mse(const policy::ActorCritic<float>& policy, const BcDataset& ds) {
  const auto out = policy.forward(ds.inputs);
  return static_cast<double>((out.mean - ds.actions).squaredNorm()) / static_cast<double>(ds.actions.size());
}

}  // namespace

BcResult behavior_clone(policy::ActorCritic<float>& policy, const DemoSet& demos, const BcOptions& opts) {
  if (opts.epochs < 0 || opts.minibatch < 1) throw std::invalid_argument("invalid cloning schedule");
  const auto ds = make_bc_dataset(policy.spec(), demos);
  const Eigen::Index n = ds.inputs.cols();

  nn::Adam<float>::Options adam_opts;
  adam_opts.learning_rate = opts.learning_rate;
  adam_opts.max_grad_norm = 0.0;
  nn::Adam<float> adam(policy.num_params(), adam_opts);
  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  BcResult res;
  nn::Vector<float> grad;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += opts.minibatch) {
      const Eigen::Index b = std::min<Eigen::Index>(opts.minibatch, n - start);
      nn::Matrix<float> x(ds.inputs.rows(), b), y(ds.actions.rows(), b);
      for (Eigen::Index j = 0; j < b; ++j) {
        x.col(j) = ds.inputs.col(order[static_cast<std::size_t>(start + j)]);
        y.col(j) = ds.actions.col(order[static_cast<std::size_t>(start + j)]);
      }
      policy::ActorCritic<float>::Tape tape;
      const auto out = policy.forward(x, &tape);
      policy::ActorCritic<float>::OutputGrad g;
      g.mean = (out.mean - y) * (2.0f / static_cast<float>(y.size()));
      grad = policy.params().zeros();
      policy.backward(tape, g, grad);
      adam.step(policy.params(), grad);
    }
    res.loss_curve.push_back(full_mse(policy, ds));
  }
  const double mse = res.loss_curve.empty() ? full_mse(policy, ds) : res.loss_curve.back();
  res.rmse = std::sqrt(mse) * policy.spec().action_scale;
  res.warning = res.rmse > opts.rmse_threshold;
  return res;
}

double replay_rmse(const policy::ActorCritic<float>& policy, const DemoRecord& demo, const sim::SimConfig& config,
                   std::uint64_t seed) {
  sim::LimbSimulator env(config, seed);
  const auto r = train::collect_rollout(policy, env, seed, nullptr);
  const auto& a = r.trajectory.transitions;
  const auto& b = demo.trajectory.transitions;
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) throw std::invalid_argument("empty demo trajectory");
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) ss += (a[t].obs.joint_angles - b[t].obs.joint_angles).squaredNorm();
  return std::sqrt(ss / static_cast<double>(2 * n));
}

}  // namespace paddle::gait
