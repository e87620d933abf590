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

#include <optional>
#include <span>
#include <stdexcept>

namespace paddle::train {

struct CycleOptions {
  double f_min = 0.1;  // Hz; slower content is treated as drift
  double f_max = 5.0;  // Hz
  int detrend_order = 3;
  double min_duration = 2.0;  // s
  // In-band peak magnitude below this fraction of the raw signal scale
  // (N * max|x|) counts as a flat spectrum.
  double relative_floor = 1e-9;
};

struct CycleEstimate {
  double f_star = 0.0;
  int H = 0;
  Eigen::Index bin = 0;
};

class NoDominantFrequency : public std::runtime_error {
 public:
  NoDominantFrequency() : std::runtime_error("no dominant paddle frequency") {}
};

// Least-squares polynomial fit over normalised time, subtracted from x.
Eigen::VectorXd remove_drift(std::span<const double> x, int order);

// Dominant paddle frequency of a lift record: drift removal, then the largest
// |DFT| bin with frequency in [f_min, f_max]. H = floor(f_s / f*) rounded down
// to even. Throws NoDominantFrequency for a flat in-band spectrum.
CycleEstimate detect_cycle(std::span<const double> lift, double f_s, const CycleOptions& opts = {});

// H used when detection fails and no earlier estimate exists.
int fallback_cycle_length(double f_s, double f_nominal = 0.45);

}  // namespace paddle::train
