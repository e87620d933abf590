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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paddle/errors.hpp"
#include "paddle/harness/config.hpp"
#include "paddle/harness/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace paddle;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

struct CommonFlags {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> variant;
  std::vector<std::string> overrides;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI config file");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--variant", f.variant, "algorithm variant, e.g. ACPPO_PID");
  cmd->add_option("--set", f.overrides, "override a config key: section.key=value (repeatable)");
  cmd->add_flag("--force", f.force, "accept fingerprint mismatches");
}

harness::RunConfig build_config(const CommonFlags& f) {
  harness::Settings s = f.config ? harness::read_settings(*f.config) : harness::Settings{};
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects section.key=value, got " + kv);
    s[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (f.seed) s["run.seed"] = std::to_string(*f.seed);
  if (f.out) s["run.out"] = *f.out;
  if (f.variant) s["run.variant"] = *f.variant;
  return harness::config_from_settings(s);
}

void print_manifest(const harness::RunManifest& m) {
  std::cout << m.command << " done, fingerprint " << m.fingerprint << "\n";
  for (const auto& a : m.artifacts) std::cout << "  " << a.role << " " << a.path.string() << " " << a.hash << "\n";
  if (!m.summary.empty()) std::cout << "  " << m.summary.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paddle: gait search, imitation pretraining and constrained RL for a paddling limb"};
  app.require_subcommand(1);

  CommonFlags search_f, pretrain_f, train_f, eval_f, transfer_f;
  std::optional<fs::path> demos, init, checkpoint, eval_demos, transfer_ckpt;
  std::optional<int> episodes, rollouts;
  bool scratch = false;
  bool dump_config = false;

  auto* search = app.add_subcommand("search", "sample, simulate and rank the sinusoid pool");
  add_common(search, search_f);
  search->add_flag("--dump-config", dump_config, "print the resolved config and exit");

  auto* pretrain = app.add_subcommand("pretrain", "behaviour cloning on the selected demos");
  add_common(pretrain, pretrain_f);
  pretrain->add_option("--demos", demos, "demo directory (default <out>/demos)");

  auto* train = app.add_subcommand("train", "constrained policy optimisation");
  add_common(train, train_f);
  train->add_option("--init", init, "initial checkpoint (default <out>/pretrain.ckpt)");
  train->add_option("--episodes", episodes, "episode budget");
  train->add_flag("--from-scratch", scratch, "start from a fresh policy");

  auto* eval = app.add_subcommand("eval", "deterministic rollouts of a checkpoint");
  add_common(eval, eval_f);
  eval->add_option("--checkpoint", checkpoint, "checkpoint (default <out>/policy.ckpt)");
  eval->add_option("--rollouts", rollouts, "number of rollouts");
  eval->add_option("--demos", eval_demos, "demo directory for the BF baseline (default <out>/demos)");

  auto* transfer = app.add_subcommand("transfer", "record a gait primitive and superpose it on the quadruped");
  add_common(transfer, transfer_f);
  transfer->add_option("--checkpoint", transfer_ckpt, "checkpoint (default <out>/policy.ckpt)");

  std::vector<fs::path> runs;
  std::string report_out = "report";
  bool report_force = false;
  auto* report = app.add_subcommand("report", "aggregate run directories into tables and curves");
  report->add_option("runs", runs, "run directories")->required();
  report->add_option("--out", report_out, "report directory");
  report->add_flag("--force", report_force, "aggregate despite fingerprint mismatches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (search->parsed()) {
      const auto cfg = build_config(search_f);
      if (dump_config) {
        std::cout << harness::config_to_ini(cfg);
        return kOk;
      }
      print_manifest(harness::cmd_search(cfg));
    } else if (pretrain->parsed()) {
      print_manifest(harness::cmd_pretrain(build_config(pretrain_f), demos, pretrain_f.force));
    } else if (train->parsed()) {
      if (episodes) train_f.overrides.push_back("train.episodes=" + std::to_string(*episodes));
      if (scratch) train_f.overrides.push_back("train.from_scratch=true");
      print_manifest(harness::cmd_train(build_config(train_f), init, train_f.force));
    } else if (eval->parsed()) {
      if (rollouts) eval_f.overrides.push_back("eval.rollouts=" + std::to_string(*rollouts));
      print_manifest(harness::cmd_eval(build_config(eval_f), checkpoint, eval_demos, eval_f.force));
    } else if (transfer->parsed()) {
      print_manifest(harness::cmd_transfer(build_config(transfer_f), transfer_ckpt, transfer_f.force));
    } else if (report->parsed()) {
      print_manifest(harness::cmd_report(runs, report_out, report_force));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
