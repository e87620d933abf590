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

#include <array>
#include <cstdint>
#include <numbers>
#include <random>

#include "paddle/cmdp/types.hpp"
#include "paddle/sim/kalman.hpp"

namespace paddle::sim {

using cmdp::ForceVector;
using cmdp::JointVector;

inline constexpr double kDegree = std::numbers::pi / 180.0;

// Serial two-link approximation of the paddling limb. Angles follow the
// sinusoid parameter frame: the thigh points along (cos θH, -sin θH) in the
// sagittal x-z plane (x forward, z up), and the shank direction angle is
// θH + θK - π, so θK = π is a straight leg. The web spans the shank.
struct LimbGeometry {
  double thigh_length = 0.10;
  double shank_length = 0.12;
  double web_area = 0.004;
  double web_drag_coefficient = 1.5;
  double water_density = 1000.0;
  JointVector neutral_angles{0.75 * std::numbers::pi, 0.75 * std::numbers::pi};
  // Drag multiplier when the web moves front-face first and folds.
  double recovery_drag_ratio = 0.05;
  int blade_elements = 4;

  void validate() const;
};

struct LimbLimits {
  double swing_limit = 20.0 * kDegree;  // about neutral, per joint
  double delta_limit = 3.0 * kDegree;   // per control step, per joint
};

struct SensorNoise {
  double force_sigma = 0.05;    // N
  double moment_sigma = 0.005;  // N m
  // Filter model; r_n defaults to the nominal noise variance.
  double force_process_noise = 1e-3;
  double force_measurement_noise = 0.05 * 0.05;
  double moment_process_noise = 1e-5;
  double moment_measurement_noise = 0.005 * 0.005;
};

struct SimConfig {
  LimbGeometry geometry;
  LimbLimits limits;
  SensorNoise noise;
  double tow_speed = 0.15;      // m/s
  double control_rate = 20.0;   // Hz
  int episode_steps = 360;
  double reward_scale = 1.0;    // r_t = reward_scale * F_x
  bool phase_clock = false;
  double clock_frequency = 0.45;  // Hz, only used when phase_clock is set

  double dt() const { return 1.0 / control_rate; }
  void validate() const;
};

struct LimbState {
  JointVector theta = JointVector::Zero();
  JointVector omega = JointVector::Zero();
  double tow_speed = 0.15;
  ForceVector raw_forces = ForceVector::Zero();
  ForceVector filtered_forces = ForceVector::Zero();
  double sim_time = 0.0;
};

// Quasi-steady flat-plate force on the web, summed over blade elements:
// each element of area A/n feels -1/2 rho C_d A |v_n| v_n along the web
// normal, with v the element velocity relative to still water (the carriage
// carries the hip forward at tow_speed). Returns (F_x, F_z, M_y about hip).
ForceVector plate_wrench(const LimbGeometry& geom, const JointVector& theta,
                         const JointVector& omega, double tow_speed);

struct LimbStepResult {
  LimbState state;
  ForceVector raw_forces;
};

// Advances joint kinematics by one control step and evaluates the hydrodynamic
// load. Deltas are clipped to the per-step limit and angles hard-clamped to the
// swing window. When `rng` is non-null, zero-mean Gaussian sensor noise is
// added to the raw readings. filtered_forces is carried over untouched.
LimbStepResult limb_step(const LimbState& state, const cmdp::Action& action, double dt,
                         const SimConfig& config, std::mt19937_64* rng);

// Clamps absolute joint angles into the swing window around neutral.
JointVector clamp_to_swing(const JointVector& theta, const SimConfig& config);

// Single-limb simulator with per-channel Kalman filtering of the sensed wrench.
// Single owner, stepped sequentially; deterministic for a fixed seed.
class LimbSimulator {
 public:
  explicit LimbSimulator(SimConfig config, std::uint64_t seed = 0);

  // Joints at neutral, at rest; filters re-initialised.
  cmdp::Observation reset(std::uint64_t seed);

  struct Outcome {
    cmdp::Observation obs;
    double reward = 0.0;
    double lift = 0.0;
    ForceVector raw_forces;
  };
  Outcome step(const cmdp::Action& action);

  const LimbState& state() const { return state_; }
  const SimConfig& config() const { return config_; }
  cmdp::Observation observe() const;

 private:
  SimConfig config_;
  LimbState state_;
  std::array<SensorFilter, cmdp::kNumForceChannels> filters_;
  std::mt19937_64 rng_;
  bool noisy_ = true;
};

}  // namespace paddle::sim
