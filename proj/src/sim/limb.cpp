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

#include "paddle/sim/limb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paddle::sim {

void LimbGeometry::validate() const {
  if (!(thigh_length > 0.0) || !(shank_length > 0.0) || !(web_area > 0.0) ||
      !(web_drag_coefficient > 0.0) || !(water_density > 0.0) || !(recovery_drag_ratio > 0.0) ||
      blade_elements < 1 || !neutral_angles.allFinite()) {
    throw std::invalid_argument("limb geometry values must be strictly positive");
  }
}

void SimConfig::validate() const {
  geometry.validate();
  if (!(limits.swing_limit > 0.0) || !(limits.delta_limit > 0.0)) {
    throw std::invalid_argument("joint limits must be strictly positive");
  }
  if (!(control_rate > 0.0) || episode_steps < 1 || !(tow_speed >= 0.0)) {
    throw std::invalid_argument("invalid simulator timing or tow speed");
  }
  if (noise.force_sigma < 0.0 || noise.moment_sigma < 0.0 || !(noise.force_measurement_noise > 0.0) ||
      !(noise.moment_measurement_noise > 0.0) || noise.force_process_noise < 0.0 ||
      noise.moment_process_noise < 0.0) {
    throw std::invalid_argument("invalid sensor noise settings");
  }
}

ForceVector plate_wrench(const LimbGeometry& geom, const JointVector& theta,
                         const JointVector& omega, double tow_speed) {
  const double th = theta[0];
  const double psi = theta[0] + theta[1] - std::numbers::pi;
  const double psi_rate = omega[0] + omega[1];

  const Eigen::Vector2d thigh_dir(std::cos(th), -std::sin(th));
  const Eigen::Vector2d knee = geom.thigh_length * thigh_dir;
  const Eigen::Vector2d knee_vel = geom.thigh_length * omega[0] * Eigen::Vector2d(-std::sin(th), -std::cos(th));
  const Eigen::Vector2d shank_dir(std::cos(psi), -std::sin(psi));
  const Eigen::Vector2d normal(std::sin(psi), std::cos(psi));

  const int n = geom.blade_elements;
  const double element_area = geom.web_area / n;
  const double half_rho_a = 0.5 * geom.water_density * element_area;

  ForceVector out = ForceVector::Zero();
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n * geom.shank_length;
    const Eigen::Vector2d pos = knee + s * shank_dir;
    // d(shank_dir)/dpsi = -normal
    Eigen::Vector2d vel = knee_vel - s * psi_rate * normal;
    vel.x() += tow_speed;
    const double vn = vel.dot(normal);
    const double cd = vn < 0.0 ? geom.web_drag_coefficient
                               : geom.web_drag_coefficient * geom.recovery_drag_ratio;
    const double magnitude = -half_rho_a * cd * std::abs(vn) * vn;
    const Eigen::Vector2d f = magnitude * normal;
    out[0] += f.x();
    out[1] += f.y();
    out[2] += pos.y() * f.x() - pos.x() * f.y();
  }
  return out;
}

JointVector clamp_to_swing(const JointVector& theta, const SimConfig& config) {
  const auto& neutral = config.geometry.neutral_angles;
  const double lim = config.limits.swing_limit;
  JointVector out;
  for (int j = 0; j < cmdp::kNumJoints; ++j) {
    out[j] = std::clamp(theta[j], neutral[j] - lim, neutral[j] + lim);
  }
  return out;
}

LimbStepResult limb_step(const LimbState& state, const cmdp::Action& action, double dt,
                         const SimConfig& config, std::mt19937_64* rng) {
  if (!action.joint_deltas.allFinite()) {
    throw std::invalid_argument("invalid action");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("time step must be positive");
  }
  const double dmax = config.limits.delta_limit;
  const JointVector delta = action.joint_deltas.cwiseMax(-dmax).cwiseMin(dmax);

  LimbStepResult res{state, ForceVector::Zero()};
  LimbState& next = res.state;
  next.theta = clamp_to_swing(state.theta + delta, config);
  next.omega = (next.theta - state.theta) / dt;
  next.sim_time = state.sim_time + dt;

  ForceVector forces = plate_wrench(config.geometry, next.theta, next.omega, state.tow_speed);
  if (rng != nullptr) {
    std::normal_distribution<double> unit(0.0, 1.0);
    forces[0] += config.noise.force_sigma * unit(*rng);
    forces[1] += config.noise.force_sigma * unit(*rng);
    forces[2] += config.noise.moment_sigma * unit(*rng);
  }
  next.raw_forces = forces;
  res.raw_forces = forces;
  return res;
}

LimbSimulator::LimbSimulator(SimConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  noisy_ = config_.noise.force_sigma > 0.0 || config_.noise.moment_sigma > 0.0;
  reset(seed);
}

cmdp::Observation LimbSimulator::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = LimbState{};
  state_.theta = config_.geometry.neutral_angles;
  state_.tow_speed = config_.tow_speed;
  const auto& nz = config_.noise;
  filters_[0] = SensorFilter::make(nz.force_process_noise, nz.force_measurement_noise);
  filters_[1] = SensorFilter::make(nz.force_process_noise, nz.force_measurement_noise);
  filters_[2] = SensorFilter::make(nz.moment_process_noise, nz.moment_measurement_noise);
  return observe();
}

LimbSimulator::Outcome LimbSimulator::step(const cmdp::Action& action) {
  auto res = limb_step(state_, action, config_.dt(), config_, noisy_ ? &rng_ : nullptr);
  state_ = res.state;
  for (int c = 0; c < cmdp::kNumForceChannels; ++c) {
    auto out = filter_step(filters_[c], res.raw_forces[c]);
    filters_[c] = out.filter;
    state_.filtered_forces[c] = out.estimate;
  }
  Outcome outcome;
  outcome.obs = observe();
  outcome.reward = config_.reward_scale * state_.filtered_forces[0];
  outcome.lift = state_.filtered_forces[1];
  outcome.raw_forces = res.raw_forces;
  return outcome;
}

cmdp::Observation LimbSimulator::observe() const {
  cmdp::Observation obs;
  obs.joint_angles = state_.theta;
  obs.joint_velocities = state_.omega;
  obs.sensed_forces = state_.filtered_forces;
  if (config_.phase_clock) {
    const double cycles = state_.sim_time * config_.clock_frequency;
    obs.phase_clock = cycles - std::floor(cycles);
  }
  return obs;
}

}  // namespace paddle::sim
