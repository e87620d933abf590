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

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace paddle::train {

// Lagrange multiplier regulated by a PID controller on the constraint
// violation g_k = J_C_hat - d:
//   lambda <- [lambda + K_P g_k + K_I sum_i g_i + K_D (g_k - g_{k-1})]_+
struct LagrangeState {
  double lambda = 0.0;
  double integral_sum = 0.0;
  double prev_violation = 0.0;
  double K_P = 0.5;
  double K_I = 0.05;
  double K_D = 0.1;
  double cost_limit = 1.0;  // d, required > 0
  // When set, the integral is clamped to [0, integral_max] (anti-windup).
  std::optional<double> integral_max;

  void validate() const {
    if (!(cost_limit > 0.0)) throw std::invalid_argument("cost limit d must be positive");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
    if (integral_max && *integral_max < 0.0) throw std::invalid_argument("integral clamp must be non-negative");
  }
};

inline LagrangeState pid_update(LagrangeState s, double cost_estimate) {
  if (!(s.cost_limit > 0.0)) throw std::invalid_argument("cost limit d must be positive");
  const double g = cost_estimate - s.cost_limit;
  s.integral_sum += g;
  if (s.integral_max) s.integral_sum = std::clamp(s.integral_sum, 0.0, *s.integral_max);
  const double next = s.lambda + s.K_P * g + s.K_I * s.integral_sum + s.K_D * (g - s.prev_violation);
  s.lambda = std::max(0.0, next);
  s.prev_violation = g;
  return s;
}

}  // namespace paddle::train
