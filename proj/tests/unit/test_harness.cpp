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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "paddle/errors.hpp"
#include "paddle/harness/config.hpp"
#include "paddle/harness/pipeline.hpp"
#include "paddle/policy/checkpoint.hpp"
#include "paddle/util/csv.hpp"
#include "paddle/util/hash.hpp"
#include "test_util.hpp"

namespace paddle::harness {
namespace {

namespace fs = std::filesystem;
using paddle::testing::TempDir;

// Seeded smoke pipeline with a 400-episode budget (RegressionRun).
constexpr double kFrozenFinalReward = -2.3788143265367396;
constexpr double kFrozenFinalCost = 0.029489346460580261;
constexpr const char* kFrozenMetricsHash = "501d1f112a3833ba87b383d85f52c5e6a5275023";
// H/2 row (F_x_mean, F_z_mean, F_z_var) of the seeded smoke transfer.
constexpr double kFrozenTransfer[3] = {-0.022503268773418093, -0.00028737687557746209, 3.6122320475444458e-05};

fs::path source_dir() { return fs::path(PADDLE_SOURCE_DIR); }

RunConfig smoke(std::uint64_t seed, const fs::path& out) {
  auto cfg = config_from_settings(read_settings(source_dir() / "configs" / "smoke.ini"));
  cfg.seed = seed;
  cfg.pretrain.seed = seed;
  cfg.out = out;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

util::ParsedCsv eval_rows(const fs::path& dir) { return util::load_csv(dir / files::kEval); }

double field(const util::ParsedCsv& csv, const std::string& policy, const std::string& rollout,
             const std::string& col) {
  const auto p = csv.column("policy"), r = csv.column("rollout"), c = csv.column(col);
  for (const auto& row : csv.rows) {
    if (row[p] == policy && row[r] == rollout) return std::stod(row[c]);
  }
  throw std::runtime_error("row not found");
}

void pipeline(const RunConfig& cfg) {
  cmd_search(cfg);
  cmd_pretrain(cfg);
  cmd_train(cfg);
}

// ---------------------------------------------------------------- config

TEST(Config, IniRoundTrip) {
  auto cfg = smoke(9, "somewhere");
  cfg.lagrange.integral_max = 3.5;
  cfg.policy.mlp_hidden = {7, 5};
  cfg.optim.cycle_clip = train::CycleLogClip::kSignSymmetric;
  const auto text = config_to_ini(cfg);
  const auto back = config_from_settings(parse_settings(text));
  EXPECT_EQ(config_to_ini(back), text);
  EXPECT_EQ(back.fingerprint(), cfg.fingerprint());
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.policy.mlp_hidden, (std::vector<int>{7, 5}));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_settings(parse_settings("[optim]\nlearning_rat = 1\n")), ConfigError);
  EXPECT_THROW(config_from_settings(parse_settings("[optim]\nlearning_rate = fast\n")), ConfigError);
  EXPECT_THROW(config_from_settings(parse_settings("[run]\nvariant = PPO_LAG\n")), ConfigError);
  EXPECT_THROW(parse_settings("seed = 3\n"), ConfigError);
  EXPECT_THROW(config_from_settings(parse_settings("[clip]\nepsilon = 0.5\n")), ConfigError);
  EXPECT_THROW(read_settings("/nonexistent/file.ini"), IoError);
}

TEST(Config, FingerprintIgnoresRunBookkeeping) {
  const auto a = smoke(1, "a");
  auto b = smoke(2, "b");
  b.variant = train::AlgoVariant::kCppoPid;
  b.episodes = 400;
  b.from_scratch = true;
  b.eval.rollouts = 9;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.lagrange.cost_limit = 0.5;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.fingerprint().size(), 16u);
}

TEST(Config, RelativeGains) {
  auto cfg = smoke(1, "a");
  cfg.gains_relative = true;
  cfg.lagrange.cost_limit = 0.01;
  cfg.lagrange.K_P = 0.2;
  cfg.lagrange.integral_max = 20.0;
  const auto eff = cfg.effective_lagrange();
  EXPECT_NEAR(eff.K_P, 20.0, 1e-12);
  EXPECT_NEAR(*eff.integral_max, 0.2, 1e-12);
}

// ---------------------------------------------------------------- search

TEST(Search, SingletonPool) {
  TempDir tmp("search1");
  auto cfg = smoke(4, tmp.path());
  cfg.search.pool_size = 1;
  cmd_search(cfg);
  const auto idx = util::load_csv(tmp / "demos" / "index.csv");
  ASSERT_EQ(idx.rows.size(), 1u);
  EXPECT_EQ(idx.rows[0][idx.column("selected")], "1");
  EXPECT_EQ(idx.rows[0][idx.column("is_BF")], "1");
  EXPECT_TRUE(fs::exists(tmp / files::kBfGait));
}

TEST(Search, DeterministicIndex) {
  TempDir a("search_a"), b("search_b");
  auto ca = smoke(12, a.path());
  ca.search.pool_size = 100;
  auto cb = ca;
  cb.out = b.path();
  cmd_search(ca);
  cmd_search(cb);
  EXPECT_EQ(util::git_blob_hash_file(a / "demos" / "index.csv"), util::git_blob_hash_file(b / "demos" / "index.csv"));
  EXPECT_EQ(util::git_blob_hash_file(a / files::kBfGait), util::git_blob_hash_file(b / files::kBfGait));
}

// ---------------------------------------------------------------- pretrain / train

TEST(Pretrain, MissingDemosIsIoError) {
  TempDir tmp("nodemo");
  EXPECT_THROW(cmd_pretrain(smoke(1, tmp.path())), IoError);
}

TEST(Train, ZeroBudgetReturnsInputCheckpoint) {
  TempDir tmp("budget0");
  auto cfg = smoke(2, tmp.path());
  cmd_search(cfg);
  cmd_pretrain(cfg);
  cfg.episodes = 0;
  cmd_train(cfg);
  EXPECT_EQ(slurp(tmp / files::kPolicyCheckpoint), slurp(tmp / files::kPretrainCheckpoint));
}

TEST(Train, PidVariantNeedsCostLimit) {
  TempDir tmp("nolimit");
  auto cfg = config_from_settings(parse_settings("[train]\nepisodes = 1\nfrom_scratch = true\n"));
  cfg.out = tmp.path();
  EXPECT_THROW(cmd_train(cfg), ConfigError);
}

TEST(Train, VariantSweepTagsMetrics) {
  TempDir tmp("sweep");
  auto base = smoke(3, tmp / "base");
  cmd_search(base);
  cmd_pretrain(base);
  std::set<std::string> tags;
  for (const auto v : train::all_variants()) {
    auto cfg = base;
    cfg.variant = v;
    cfg.out = tmp / std::string(train::variant_name(v));
    cmd_train(cfg, base.out / files::kPretrainCheckpoint);
    const auto csv = util::load_csv(cfg.out / files::kMetrics);
    EXPECT_EQ(csv.rows.size(), 5u);
    std::string tag;
    for (const auto& c : csv.comments) {
      if (c.rfind("variant=", 0) == 0) tag = c.substr(8);
    }
    EXPECT_EQ(tag, train::variant_name(v));
    tags.insert(tag);
  }
  EXPECT_EQ(tags.size(), 7u);
}

TEST(Train, NumericalAbortKeepsLastGoodCheckpoint) {
  TempDir tmp("nan");
  auto cfg = smoke(5, tmp.path());
  cmd_search(cfg);
  cmd_pretrain(cfg);
  const auto before = slurp(tmp / files::kPretrainCheckpoint);
  // the learning rate is part of the fingerprint, hence the forced load
  cfg.optim.adam.learning_rate = 1e30;
  EXPECT_THROW(cmd_train(cfg, std::nullopt, true), NumericalAbort);
  ASSERT_TRUE(fs::exists(tmp / files::kPolicyCheckpoint));
  const auto ckpt = policy::load_checkpoint(tmp / files::kPolicyCheckpoint);
  const auto net = policy::policy_from_checkpoint<float>(ckpt);
  EXPECT_TRUE(net.params().values().allFinite());
  const auto metrics = util::load_csv(tmp / files::kMetrics);
  if (metrics.rows.empty()) EXPECT_EQ(slurp(tmp / files::kPolicyCheckpoint), before);
}

// ---------------------------------------------------------------- eval

TEST(Eval, NoiseFreeRolloutsHaveZeroSpread) {
  TempDir tmp("evalq");
  auto cfg = smoke(6, tmp.path());
  cfg.sim.noise.force_sigma = 0.0;
  cfg.sim.noise.moment_sigma = 0.0;
  pipeline(cfg);
  cmd_eval(cfg);
  const auto csv = eval_rows(tmp.path());
  EXPECT_EQ(field(csv, "policy", "std", "undiscounted_reward"), 0.0);
  EXPECT_EQ(field(csv, "policy", "std", "avg_cost"), 0.0);
  EXPECT_EQ(field(csv, "bf", "std", "undiscounted_reward"), 0.0);
}

TEST(Eval, RolloutCountAndMismatch) {
  TempDir tmp("eval9");
  auto cfg = smoke(7, tmp.path());
  pipeline(cfg);
  cfg.eval.rollouts = 9;
  cmd_eval(cfg);
  const auto csv = eval_rows(tmp.path());
  EXPECT_NO_THROW(field(csv, "policy", "8", "avg_cost"));
  EXPECT_THROW(field(csv, "policy", "9", "avg_cost"), std::runtime_error);
  auto other = cfg;
  other.policy.mlp_hidden = {16};
  EXPECT_THROW(cmd_eval(other), ConfigError);
}

// ---------------------------------------------------------------- report

struct ReportFixture : ::testing::Test {
  static void SetUpTestSuite() {
    root_ = new TempDir("report");
    auto base = smoke(20, root_->path() / "base");
    cmd_search(base);
    cmd_pretrain(base);
    for (int s = 0; s < 3; ++s) {
      auto cfg = base;
      cfg.seed = 20 + static_cast<std::uint64_t>(s);
      cfg.out = root_->path() / ("acppo" + std::to_string(s));
      cmd_train(cfg, base.out / files::kPretrainCheckpoint);
      cmd_eval(cfg, std::nullopt, base.out / files::kDemoDir);
    }
    auto cppo = base;
    cppo.variant = train::AlgoVariant::kCppoPid;
    cppo.out = root_->path() / "cppo";
    cmd_train(cppo, base.out / files::kPretrainCheckpoint);
    cmd_eval(cppo);
  }
  static void TearDownTestSuite() {
    delete root_;
    root_ = nullptr;
  }
  static fs::path run(const std::string& name) { return root_->path() / name; }
  static TempDir* root_;
};
TempDir* ReportFixture::root_ = nullptr;

std::vector<std::string> report_row(const fs::path& out, const std::string& variant) {
  const auto csv = util::load_csv(out / files::kReportTable);
  for (const auto& row : csv.rows) {
    if (row[0] == variant) return row;
  }
  return {};
}

TEST_F(ReportFixture, SingleRunIdentity) {
  TempDir out("rep1");
  cmd_report({run("acppo0")}, out.path());
  const auto row = report_row(out.path(), "ACPPO_PID");
  ASSERT_EQ(row.size(), std::size(kReportColumns));
  const auto ev = eval_rows(run("acppo0"));
  EXPECT_EQ(std::stod(row[2]), field(ev, "policy", "mean", "undiscounted_reward"));
  EXPECT_EQ(std::stod(row[3]), 0.0);
  EXPECT_EQ(std::stod(row[4]), field(ev, "policy", "mean", "avg_cost"));
  const auto metrics = util::load_csv(run("acppo0") / files::kMetrics);
  EXPECT_EQ(std::stod(row[6]), std::stod(metrics.rows.back()[metrics.column("undiscounted_reward")]));
  const auto curve = util::load_csv(out / "curve_ACPPO_PID.csv");
  ASSERT_EQ(curve.rows.size(), metrics.rows.size());
  for (std::size_t e = 0; e < curve.rows.size(); ++e) {
    EXPECT_EQ(std::stod(curve.rows[e][1]), std::stod(metrics.rows[e][metrics.column("undiscounted_reward")]));
  }
}

TEST_F(ReportFixture, ThreeSeedStatistics) {
  TempDir out("rep3");
  cmd_report({run("acppo0"), run("acppo1"), run("acppo2")}, out.path());
  const auto row = report_row(out.path(), "ACPPO_PID");
  ASSERT_FALSE(row.empty());
  EXPECT_EQ(row[1], "3");
  double x[3];
  for (int s = 0; s < 3; ++s) x[s] = field(eval_rows(run("acppo" + std::to_string(s))), "policy", "mean", "avg_cost");
  const double mean = (x[0] + x[1] + x[2]) / 3.0;
  const double sd = std::sqrt(((x[0] - mean) * (x[0] - mean) + (x[1] - mean) * (x[1] - mean) +
                               (x[2] - mean) * (x[2] - mean)) / 3.0);
  EXPECT_REL(std::stod(row[4]), mean, 1e-12);
  EXPECT_REL(std::stod(row[5]), sd, 1e-12);
  EXPECT_GT(std::stod(row[5]), 0.0);
}

TEST_F(ReportFixture, MixedVariantsOneRowEach) {
  TempDir out("repmix");
  cmd_report({run("cppo"), run("acppo0"), run("acppo1")}, out.path());
  const auto csv = util::load_csv(out / files::kReportTable);
  ASSERT_EQ(csv.rows.size(), 2u);
  EXPECT_EQ(csv.rows[0][0], "ACPPO_PID");
  EXPECT_EQ(csv.rows[0][1], "2");
  EXPECT_EQ(csv.rows[1][0], "CPPO_PID");
  EXPECT_TRUE(fs::exists(out / "curve_CPPO_PID.csv"));
}

TEST_F(ReportFixture, FingerprintMismatchNeedsForce) {
  TempDir other("repother");
  auto cfg = smoke(30, other.path());
  cfg.lagrange.cost_limit = 0.05;
  cfg.from_scratch = true;
  cmd_train(cfg);
  TempDir out("repforce");
  EXPECT_THROW(cmd_report({run("acppo0"), other.path()}, out.path()), ConfigError);
  EXPECT_NO_THROW(cmd_report({run("acppo0"), other.path()}, out.path(), true));
  EXPECT_THROW(cmd_report({}, out.path()), ConfigError);
}

// ---------------------------------------------------------------- transfer

TEST(Transfer, WritesBothOffsets) {
  TempDir tmp("transfer");
  auto cfg = smoke(8, tmp.path());
  pipeline(cfg);
  cmd_transfer(cfg);
  const auto csv = util::load_csv(tmp / files::kTransfer);
  ASSERT_EQ(csv.rows.size(), 2u);
  const int H = std::stoi(csv.rows[0][1]);
  EXPECT_EQ(std::stoi(csv.rows[0][0]), H / 2);
  EXPECT_EQ(csv.rows[1][0], "0");
  EXPECT_EQ(std::stod(csv.rows[0][5]), 0.0);
  const auto prim = sim::load_gait_primitive(tmp / files::kGaitPrimitive);
  EXPECT_EQ(prim.cycle_length(), H);
}

// ---------------------------------------------------------------- regression

TEST(Regression, SeededSmokeTransfer) {
  TempDir tmp("frozen_transfer");
  auto cfg = smoke(1, tmp.path());
  pipeline(cfg);
  cmd_transfer(cfg);
  const auto csv = util::load_csv(tmp / files::kTransfer);
  const double got[3] = {std::stod(csv.rows[0][2]), std::stod(csv.rows[0][3]), std::stod(csv.rows[0][4])};
  for (int i = 0; i < 3; ++i) EXPECT_REL(got[i], kFrozenTransfer[i], 1e-9);
}

TEST(Regression, SeededAcppoRun) {
  TempDir tmp("frozen_run");
  auto cfg = smoke(1, tmp.path());
  cfg.episodes = 400;
  const auto m = [&] {
    cmd_search(cfg);
    cmd_pretrain(cfg);
    return cmd_train(cfg);
  }();
  const double r = m.summary["final_reward"].get<double>();
  const double c = m.summary["final_cost"].get<double>();
  const auto hash = util::git_blob_hash_file(tmp / files::kMetrics);
  EXPECT_REL(r, kFrozenFinalReward, 1e-9);
  EXPECT_REL(c, kFrozenFinalCost, 1e-9);
  EXPECT_EQ(hash, kFrozenMetricsHash);
}

// ---------------------------------------------------------------- CLI

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PADDLE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir tmp("cli");
  const std::string smoke_ini = (source_dir() / "configs" / "smoke.ini").string();
  const std::string out = " --out " + tmp.path().string();
  const auto bad = tmp / "bad.ini";
  std::ofstream(bad) << "[optim]\nno_such_key = 1\n";

  EXPECT_EQ(run_cli("search --config " + bad.string() + out), 2);
  EXPECT_EQ(run_cli("search --config " + smoke_ini + " --variant NOPE" + out), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("search --config " + (tmp / "missing.ini").string() + out), 4);
  EXPECT_EQ(run_cli("pretrain --config " + smoke_ini + out), 4);
  EXPECT_EQ(run_cli("search --config " + smoke_ini + " --seed 3" + out), 0);
  EXPECT_EQ(run_cli("pretrain --config " + smoke_ini + " --seed 3" + out), 0);
  EXPECT_EQ(run_cli("train --config " + smoke_ini + " --seed 3 --set optim.learning_rate=1e30 --force" + out), 3);
  EXPECT_TRUE(fs::exists(tmp / files::kPolicyCheckpoint));
  EXPECT_EQ(run_cli("train --config " + smoke_ini + " --seed 3 --variant CPPO_PID" + out), 0);
  EXPECT_EQ(run_cli("eval --config " + smoke_ini + " --seed 3" + out), 0);
  EXPECT_EQ(run_cli("transfer --config " + smoke_ini + " --seed 3" + out), 0);
  EXPECT_EQ(run_cli("report " + tmp.path().string() + " --out " + (tmp / "rep").string()), 0);
  EXPECT_TRUE(fs::exists(tmp / "rep" / files::kReportTable));
}

}  // namespace
}  // namespace paddle::harness
