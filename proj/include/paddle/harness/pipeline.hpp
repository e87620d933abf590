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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "paddle/harness/config.hpp"

namespace paddle::harness {

struct Artifact {
  std::string role;
  std::filesystem::path path;
  std::string hash;  // git blob id of the file contents
};

struct RunManifest {
  std::string command;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::string variant;
  std::string started;
  std::string finished;
  std::vector<Artifact> artifacts;
  nlohmann::json summary = nlohmann::json::object();

  void add(std::string role, const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // Writes <out>/manifest_<command>.json.
  void save(const std::filesystem::path& out_dir) const;
};

// Fixed artifact names inside a run directory.
namespace files {
inline constexpr const char* kDemoDir = "demos";
inline constexpr const char* kBfGait = "bf_gait.csv";
inline constexpr const char* kPoolStats = "pool_stats.csv";
inline constexpr const char* kPretrainCheckpoint = "pretrain.ckpt";
inline constexpr const char* kBcLoss = "bc_loss.csv";
inline constexpr const char* kPolicyCheckpoint = "policy.ckpt";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kEval = "eval.csv";
inline constexpr const char* kGaitPrimitive = "gait_primitive.csv";
inline constexpr const char* kTransfer = "transfer.csv";
inline constexpr const char* kReportTable = "report_table.csv";
}  // namespace files

inline constexpr const char* kEvalColumns[] = {"policy", "rollout", "undiscounted_reward", "avg_cost"};
inline constexpr const char* kTransferColumns[] = {"offset", "H", "F_x_mean", "F_z_mean", "F_z_var", "M_Z_max_abs"};
inline constexpr const char* kReportColumns[] = {"variant",   "seeds",         "reward_mean", "reward_std",
                                                 "cost_mean", "cost_std",      "train_reward_mean",
                                                 "train_reward_std", "train_cost_mean", "train_cost_std"};
inline constexpr const char* kCurveColumns[] = {"episode", "reward_mean", "reward_std", "cost_mean", "cost_std",
                                                "lambda_mean"};

// Pool sampling, simulation and selection. Writes the demo directory, the
// BF gait primitive and pool statistics.
RunManifest cmd_search(const RunConfig& config);

// Behaviour cloning on a demo directory (default <out>/demos).
RunManifest cmd_pretrain(const RunConfig& config, const std::optional<std::filesystem::path>& demo_dir = {},
                         bool force = false);

// Safe-RL training from `init` (default <out>/pretrain.ckpt) or from scratch
// when config.from_scratch is set. On a numerical abort the last good
// checkpoint and the metrics so far are written before NumericalAbort
// propagates.
RunManifest cmd_train(const RunConfig& config, const std::optional<std::filesystem::path>& init = {},
                      bool force = false);

// Deterministic rollouts of a checkpoint (default <out>/policy.ckpt). When a
// demo directory is available its BF gait is evaluated on the same seeds.
RunManifest cmd_eval(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint = {},
                     const std::optional<std::filesystem::path>& demo_dir = {}, bool force = false);

// Records one cycle of the trained policy and superposes it on the
// quadruped with H/2 and 0 pair offsets.
RunManifest cmd_transfer(const RunConfig& config, const std::optional<std::filesystem::path>& checkpoint = {},
                         bool force = false);

// Seed aggregation over completed run directories, grouped by variant.
RunManifest cmd_report(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out,
                       bool force = false);

// Policy cycle capture used by cmd_transfer.
sim::GaitPrimitive capture_policy_cycle(const train::Policy& policy, const RunConfig& config);

}  // namespace paddle::harness
