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

#include "paddle/cmdp/types.hpp"

#include <stdexcept>

namespace paddle::cmdp {

std::vector<double> Trajectory::lifts() const {
  std::vector<double> out;
  out.reserve(transitions.size());
  for (const auto& tr : transitions) out.push_back(tr.lift);
  return out;
}

std::vector<double> Trajectory::rewards() const {
  std::vector<double> out;
  out.reserve(transitions.size());
  for (const auto& tr : transitions) out.push_back(tr.reward);
  return out;
}

std::vector<double> Trajectory::costs() const {
  std::vector<double> out;
  out.reserve(transitions.size());
  for (const auto& tr : transitions) out.push_back(tr.cost);
  return out;
}

DiscountedSummary discounted_summary(const Trajectory& traj, double gamma) {
  if (traj.empty()) {
    throw std::invalid_argument("empty trajectory");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("discount factor must lie in (0, 1]");
  }
  DiscountedSummary s;
  double discount = 1.0;
  double cost_sum = 0.0;
  for (const auto& tr : traj.transitions) {
    s.return_J += discount * tr.reward;
    s.cost_J_C += discount * tr.cost;
    s.undiscounted_reward += tr.reward;
    cost_sum += tr.cost;
    discount *= gamma;
  }
  s.undiscounted_cost_mean = cost_sum / static_cast<double>(traj.size());
  return s;
}

void recompute_costs(Trajectory& traj, int H) {
  const int even_h = even_cycle_length(H);
  const std::vector<double> lift = traj.lifts();
  const std::span<const double> view(lift);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    traj.transitions[t].cost = half_cycle_cost(view, t, even_h);
  }
}

void segment_cycles(Trajectory& traj, int H) {
  if (H < 1) {
    throw std::invalid_argument("invalid cycle length");
  }
  traj.cycle_length = H;
  traj.cycle_segments.clear();
  const auto len = static_cast<std::size_t>(H);
  for (std::size_t begin = 0; begin + len <= traj.size(); begin += len) {
    traj.cycle_segments.push_back({begin, len});
  }
}

}  // namespace paddle::cmdp
