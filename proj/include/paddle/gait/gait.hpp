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
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "paddle/cmdp/types.hpp"
#include "paddle/sim/limb.hpp"
#include "paddle/sim/quad.hpp"

namespace paddle::gait {

using cmdp::JointVector;

// theta_H = A_H sin(2 pi f t) + theta_H0, theta_K = A_K sin(2 pi f t + phi) + theta_K0
struct GaitParams {
  double A_H = 0.0;
  double A_K = 0.0;
  double f = 0.0;
  double phi = 0.0;
  double theta_H0 = 0.0;
  double theta_K0 = 0.0;

  std::array<double, 6> as_array() const { return {A_H, A_K, f, phi, theta_H0, theta_K0}; }
  static GaitParams from_array(const std::array<double, 6>& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
  bool operator==(const GaitParams&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

// Per-parameter sampling box, same order as GaitParams::as_array().
struct ParamRanges {
  std::array<Interval, 6> bounds{{
      {std::numbers::pi / 6.0, std::numbers::pi / 3.0},
      {std::numbers::pi / 12.0, std::numbers::pi / 4.0},
      {0.3, 0.6},
      {0.0, std::numbers::pi},
      {std::numbers::pi / 4.0, 1.25 * std::numbers::pi},
      {std::numbers::pi / 4.0, 1.25 * std::numbers::pi},
  }};

  bool contains(const GaitParams& p) const;
  void validate() const;
};

// Samples of the sinusoidal gait at t = k / f_s for k < floor(duration * f_s), clamped to
// the simulator swing window. Throws "params outside Table I ranges".
std::vector<JointVector> sinusoid_trajectory(const GaitParams& params, double duration, double f_s,
                                             const sim::SimConfig& config, const ParamRanges& ranges = {});

// Latin hypercube: each dimension split into n equal bins, one sample per bin.
std::vector<GaitParams> lhs_sample(int n, std::uint64_t seed, const ParamRanges& ranges = {});

struct DemoRecord {
  GaitParams params;
  cmdp::Trajectory trajectory;
  double mean_thrust = 0.0;
  double mean_abs_lift = 0.0;
};

// Runs the gait on a fresh simulator for one episode. The limb starts at
// neutral and tracks the sinusoid through rate-limited joint deltas.
// Costs use the cycle length implied by the gait frequency.
DemoRecord simulate_demo(const GaitParams& params, const sim::SimConfig& config, std::uint64_t seed,
                         const ParamRanges& ranges = {});

struct SelectionMeta {
  double top_thrust_fraction = 0.1;
  double lift_percentile = 50.0;
  double lift_threshold = 0.0;
  std::size_t pool_size = 0;
};

struct DemoSet {
  std::vector<DemoRecord> records;
  std::vector<std::size_t> selected;  // pool indices of records, in rank order
  std::size_t bf_index = 0;           // pool index of the best-thrust record
  std::optional<DemoRecord> bf;
  SelectionMeta meta;
};

// Thrust-ranked pool order: thrust descending, then lower lift, then params
// lexicographically.
std::vector<std::size_t> thrust_ranking(const std::vector<DemoRecord>& pool);

DemoSet rank_and_select(const std::vector<DemoRecord>& pool, double top_thrust_fraction = 0.1,
                        double lift_percentile = 50.0);

// Linear-interpolated percentile (p in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

// selection_rank is the position in the thrust ranking of selected records
// and -1 otherwise.
// Demo directory layout: index.csv plus demo_<pool index>.csv per selected
// record.
inline constexpr const char* kDemoIndexColumns[] = {
    "pool_index", "A_H", "A_K", "f", "phi", "theta_H0", "theta_K0", "mean_thrust", "mean_abs_lift", "selected", "selection_rank",
    "is_BF"};

void save_demo_set(const std::filesystem::path& dir, const std::vector<DemoRecord>& pool, const DemoSet& set,
                   const std::string& fingerprint);
DemoSet load_demo_set(const std::filesystem::path& dir);

// One period of the gait as a primitive (H = floor(f_s / f) rounded even).
sim::GaitPrimitive gait_primitive_from_params(const GaitParams& params, const sim::SimConfig& config,
                                              const ParamRanges& ranges = {});

}  // namespace paddle::gait
