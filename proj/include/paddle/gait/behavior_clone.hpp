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
#include <vector>

#include "paddle/gait/gait.hpp"
#include "paddle/nn/adam.hpp"
#include "paddle/policy/policy.hpp"

namespace paddle::gait {

struct BcOptions {
  int epochs = 60;
  int minibatch = 64;
  double learning_rate = 1e-3;
  // Demo-replay RMSE of the mean action, radians per step.
  double rmse_threshold = 0.5 * sim::kDegree;
  std::uint64_t seed = 0;
};

struct BcResult {
  std::vector<double> loss_curve;  // full-set MSE after each epoch, network units
  double rmse = 0.0;               // radians
  bool warning = false;            // rmse above threshold
};

// State-action pairs of the demo set: windows (input_dim x N) and actions in
// network units (act_dim x N).
struct BcDataset {
  nn::Matrix<float> inputs;
  nn::Matrix<float> actions;
};

BcDataset make_bc_dataset(const policy::PolicySpec& spec, const DemoSet& demos);

// Regresses the policy mean onto the demo actions (MSE). Only the actor
// parameters move. Zero epochs leaves the policy untouched.
BcResult behavior_clone(policy::ActorCritic<float>& policy, const DemoSet& demos, const BcOptions& opts = {});

// RMSE between the joint angles of a deterministic closed-loop rollout of the
// policy and those of the demo, on a simulator with the given configuration.
double replay_rmse(const policy::ActorCritic<float>& policy, const DemoRecord& demo, const sim::SimConfig& config,
                   std::uint64_t seed);

}  // namespace paddle::gait
