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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "paddle/gait/behavior_clone.hpp"
#include "paddle/gait/gait.hpp"
#include "paddle/policy/policy.hpp"
#include "paddle/sim/limb.hpp"
#include "paddle/sim/quad.hpp"
#include "paddle/train/trainer.hpp"

namespace paddle::harness {

struct SearchSettings {
  int pool_size = 500;
  double top_thrust_fraction = 0.1;
  double lift_percentile = 50.0;
};

struct EvalSettings {
  int rollouts = 3;
};

struct TransferSettings {
  sim::QuadGeometry geometry;
  int n_cycles = 10;
  int max_attempts = 3;
};

// Everything a run depends on. Every field has a default except the cost
// limit, which training requires explicitly.
struct RunConfig {
  std::uint64_t seed = 0;
  train::AlgoVariant variant = train::AlgoVariant::kAcppoPid;
  std::filesystem::path out = "runs/default";

  sim::SimConfig sim;
  gait::ParamRanges ranges;
  SearchSettings search;
  policy::PolicySpec policy;
  gait::BcOptions pretrain;
  train::ClipSchedule clip;
  train::LagrangeState lagrange;
  bool cost_limit_set = false;
  // When set, K_P, K_I, K_D are read in units of 1/d and integral_max in
  // units of d, so one gain set serves any cost limit.
  bool gains_relative = false;
  train::TrainOptions optim;
  int episodes = 50;
  bool from_scratch = false;
  EvalSettings eval;
  TransferSettings transfer;

  void validate() const;
  // Multiplier state with relative gains resolved against d.
  train::LagrangeState effective_lagrange() const;
  // Seed, variant, paths, episode and rollout budgets and the scratch flag are
  // excluded; artifacts tag the variant and init mode separately.
  nlohmann::json to_json() const;
  std::string fingerprint() const;
};

// Flat "section.key" -> value view of an INI file.
using Settings = std::map<std::string, std::string>;

Settings read_settings(const std::filesystem::path& path);
Settings parse_settings(const std::string& ini_text);

// Applies settings over the defaults; unknown keys and malformed values raise
// ConfigError.
RunConfig config_from_settings(const Settings& settings);

// Writes every field back as INI text (round-trips through parse_settings).
std::string config_to_ini(const RunConfig& config);

}  // namespace paddle::harness
