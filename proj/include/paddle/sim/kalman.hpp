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

#include <cmath>
#include <stdexcept>

namespace paddle::sim {

// Scalar Kalman filter with a random-walk process model. One instance per
// sensor channel.
struct SensorFilter {
  double estimate = 0.0;
  double variance = 1.0;
  double process_noise = 1e-3;      // q
  double measurement_noise = 2.5e-3;  // r_n

  static SensorFilter make(double q, double r, double initial_estimate = 0.0,
                           double initial_variance = 1.0) {
    if (!(q >= 0.0) || !(r > 0.0) || !(initial_variance >= 0.0)) {
      throw std::invalid_argument("filter variances must be non-negative (r strictly positive)");
    }
    return SensorFilter{initial_estimate, initial_variance, q, r};
  }
};

struct FilterOutput {
  SensorFilter filter;
  double estimate = 0.0;
};

inline FilterOutput filter_step(SensorFilter filter, double measurement) {
  if (!std::isfinite(measurement)) {
    throw std::invalid_argument("filter measurement must be finite");
  }
  filter.variance += filter.process_noise;
  const double gain = filter.variance / (filter.variance + filter.measurement_noise);
  filter.estimate += gain * (measurement - filter.estimate);
  filter.variance *= (1.0 - gain);
  return {filter, filter.estimate};
}

}  // namespace paddle::sim
