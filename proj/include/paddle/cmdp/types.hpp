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

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace paddle::cmdp {

inline constexpr int kNumJoints = 2;
inline constexpr int kNumForceChannels = 3;

// Joint order is (HFE, KFE) everywhere.
using JointVector = Eigen::Vector2d;
// Force channel order is (F_x, F_z, M_y) everywhere.
using ForceVector = Eigen::Vector3d;

struct Observation {
  JointVector joint_angles = JointVector::Zero();
  JointVector joint_velocities = JointVector::Zero();
  ForceVector sensed_forces = ForceVector::Zero();
  std::optional<double> phase_clock;

  bool is_finite() const {
    return joint_angles.allFinite() && joint_velocities.allFinite() &&
           sensed_forces.allFinite() &&
           (!phase_clock || std::isfinite(*phase_clock));
  }
};

// Per-step joint angle change command, radians.
struct Action {
  JointVector joint_deltas = JointVector::Zero();
};

struct Transition {
  Observation obs;
  Action action;
  double reward = 0.0;
  double cost = 0.0;
  double logp_behavior = 0.0;
  bool done = false;
  int step_index = 0;
  // Sensed F_z produced by this step; the cost channel is derived from it.
  double lift = 0.0;
};

struct CycleSegment {
  std::size_t begin = 0;
  std::size_t length = 0;
  std::size_t end() const { return begin + length; }
};

struct Trajectory {
  std::vector<Transition> transitions;
  int cycle_length = 0;
  std::vector<CycleSegment> cycle_segments;
  // Observation reached after the last transition (value bootstrap).
  std::optional<Observation> terminal_obs;

  std::size_t size() const { return transitions.size(); }
  bool empty() const { return transitions.empty(); }

  std::vector<double> lifts() const;
  std::vector<double> rewards() const;
  std::vector<double> costs() const;
};

struct DiscountedSummary {
  double return_J = 0.0;
  double cost_J_C = 0.0;
  double undiscounted_reward = 0.0;
  double undiscounted_cost_mean = 0.0;
};

// Discounted reward/cost sums plus the undiscounted episode reward and mean
// per-step cost used for reporting.
DiscountedSummary discounted_summary(const Trajectory& traj, double gamma);

// Rounds a detected cycle length down to the nearest even integer.
inline int even_cycle_length(int steps) { return steps - (steps % 2); }

// |F_z[t] + F_z[t - H/2]|; for t < H/2 the missing partner counts as zero.
template <typename Scalar>
Scalar half_cycle_cost(std::span<const Scalar> lift, std::size_t t, int H) {
  if (H < 2) {
    throw std::invalid_argument("invalid cycle length");
  }
  if (t >= lift.size()) {
    throw std::out_of_range("half_cycle_cost: index past end of lift history");
  }
  const auto half = static_cast<std::size_t>(H / 2);
  if (t < half) {
    return std::abs(lift[t]);
  }
  return std::abs(lift[t] + lift[t - half]);
}

// Recomputes every transition's cost from the stored lift history with cycle
// length H (rounded down to even).
void recompute_costs(Trajectory& traj, int H);

// Splits the trajectory into consecutive disjoint segments of exactly H steps,
// starting at index 0. Trailing steps that do not fill a cycle are left out.
void segment_cycles(Trajectory& traj, int H);

}  // namespace paddle::cmdp
