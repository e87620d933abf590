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

#include <filesystem>
#include <string>
#include <string_view>

#include "paddle/cmdp/types.hpp"

namespace paddle::cmdp {

// Newline-delimited records, one per transition, preceded by a header row:
//
//   step_index,theta_H,theta_K,omega_H,omega_K,F_x,F_z,M_y,phase_clock,
//   delta_H,delta_K,reward,cost,logp,done,lift
//
// phase_clock is "nan" when the observation carries no clock. Numbers are
// written in shortest round-trip form, so read(write(t)) == t exactly.
inline constexpr std::string_view kTrajectoryColumns =
    "step_index,theta_H,theta_K,omega_H,omega_K,F_x,F_z,M_y,phase_clock,"
    "delta_H,delta_K,reward,cost,logp,done,lift";

std::string trajectory_to_text(const Trajectory& traj);
Trajectory trajectory_from_text(std::string_view text);

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace paddle::cmdp
