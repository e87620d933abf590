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
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "paddle/cmdp/types.hpp"
#include "paddle/nn/adam.hpp"
#include "paddle/policy/policy.hpp"
#include "paddle/sim/limb.hpp"
#include "paddle/train/cycle.hpp"
#include "paddle/train/gae.hpp"
#include "paddle/train/lagrange.hpp"
#include "paddle/train/objective.hpp"
#include "paddle/train/variants.hpp"

namespace paddle::train {

using Policy = policy::ActorCritic<float>;

enum class CostEstimator { kAverage, kDiscounted };

struct TrainOptions {
  AdvantageOptions advantage;
  LossCoefficients coefficients;
  nn::Adam<float>::Options adam;
  int epochs = 10;
  int minibatch = 64;
  CycleOptions cycle;
  CycleLogClip cycle_clip = CycleLogClip::kLiteral;
  CostEstimator cost_estimator = CostEstimator::kAverage;
};

struct EpisodeMetrics {
  int episode = 0;
  double undiscounted_reward = 0.0;
  double avg_cost = 0.0;
  double lambda = 0.0;  // multiplier used for this update
  double f_star = 0.0;  // 0 when detection failed
  int H = 0;
  bool cycle_detected = false;
  double L_step = 0.0;
  double L_cyc = 0.0;
  double L_actor = 0.0;
  double L_value_r = 0.0;
  double L_value_c = 0.0;
  double clip_upper = 0.0;
  double clip_lower = 0.0;
  double clip_widened = 0.0;
  double J_C_hat = 0.0;
};

inline constexpr const char* kMetricsColumns[] = {
    "episode", "undiscounted_reward", "avg_cost", "lambda", "f_star", "H", "L_step", "L_cyc", "L_actor",
    "L_value_r", "L_value_c", "clip_upper_frac", "clip_lower_frac", "clip_widened_frac"};

std::vector<std::string> metrics_row(const EpisodeMetrics& m);

// Episode collected under the current policy.
struct Rollout {
  cmdp::Trajectory trajectory;
  std::vector<cmdp::Observation> history;  // obs of every step plus the terminal one
};

// Samples (or, when `rng` is null, takes the mean of) the policy for one
// episode on a freshly reset simulator.
Rollout collect_rollout(const Policy& policy, sim::LimbSimulator& env, std::uint64_t env_seed, std::mt19937_64* rng);

// Cycle length from the trajectory's lift channel. On failure returns
// `fallback` with detected = false.
struct CycleResult {
  int H = 0;
  double f_star = 0.0;
  bool detected = false;
};
CycleResult cycle_from_lift(const cmdp::Trajectory& traj, double f_s, const CycleOptions& opts, int fallback);

// Everything the optimisation phase consumes, in network units.
struct PreparedBatch {
  MinibatchData<float> data;  // whole batch, cycle segments included
  AdvantageSet advantages;
  CycleResult cycle;
  double undiscounted_reward = 0.0;
  double avg_cost = 0.0;
  double discounted_cost = 0.0;
};

struct UpdateStats {
  double L_step = 0.0, L_cyc = 0.0, L_actor = 0.0, L_value_r = 0.0, L_value_c = 0.0;
  double clip_upper = 0.0, clip_lower = 0.0, clip_widened = 0.0;
};

// Alternates rollout collection, cycle detection and cost recomputation,
// dual GAE, minibatch optimisation and the multiplier update.
class Trainer {
 public:
  Trainer(Policy policy, sim::SimConfig sim_config, LagrangeState lagrange, ClipSchedule sched, AlgoVariant variant,
          TrainOptions opts, std::uint64_t seed);

  // Overrides the variant's default rules (used for reduction checks).
  void set_rules(const VariantRules& rules) { rules_ = rules; }

  EpisodeMetrics iterate();

  Rollout collect();
  PreparedBatch prepare(Rollout rollout);
  // Throws NumericalAbort (after restoring the pre-update parameters) on a
  // non-finite loss or gradient.
  UpdateStats optimize(const PreparedBatch& batch);
  // Multiplier update from the batch's cost estimate.
  void update_multiplier(double cost_estimate);

  const Policy& policy() const { return policy_; }
  Policy& policy() { return policy_; }
  const LagrangeState& lagrange() const { return lagrange_; }
  LagrangeState& lagrange() { return lagrange_; }
  const nn::Adam<float>& optimizer() const { return adam_; }
  nn::Adam<float>& optimizer() { return adam_; }
  const VariantRules& rules() const { return rules_; }
  int episode() const { return episode_; }
  void set_episode(int e) { episode_ = e; }
  int last_cycle_length() const { return last_H_; }

 private:
  Policy policy_;
  sim::SimConfig sim_config_;
  sim::LimbSimulator env_;
  LagrangeState lagrange_;
  ClipSchedule sched_;
  AlgoVariant variant_;
  VariantRules rules_;
  TrainOptions opts_;
  nn::Adam<float> adam_;
  std::uint64_t seed_;
  int episode_ = 0;
  int last_H_ = 0;
};

// Deterministic mean-action rollouts.
struct EvalResult {
  std::vector<double> rewards;
  std::vector<double> costs;
  double reward_mean = 0.0, reward_std = 0.0;
  double cost_mean = 0.0, cost_std = 0.0;
};

// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& v);

EvalResult evaluate_policy(const Policy& policy, const sim::SimConfig& config, int n_rollouts, std::uint64_t seed,
                           const CycleOptions& cycle = {});

// Undiscounted reward and mean cost of an already collected episode, with
// costs recomputed from its own detected cycle.
std::pair<double, double> score_trajectory(cmdp::Trajectory traj, double f_s, const CycleOptions& cycle,
                                           int fallback_H);

}  // namespace paddle::train
