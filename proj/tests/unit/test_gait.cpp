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

#include <random>
#include <set>

#include "paddle/gait/behavior_clone.hpp"
#include "paddle/gait/gait.hpp"
#include "paddle/util/hash.hpp"
#include "test_util.hpp"

namespace paddle::gait {
namespace {

constexpr double kPi = std::numbers::pi;
// Closed-loop replay RMSE (rad) of the cloned policy in BcRegression.
constexpr double kFrozenReplayRmse = 0.29872230850169845;

sim::SimConfig quiet_config() {
  sim::SimConfig c;
  c.noise.force_sigma = 0.0;
  c.noise.moment_sigma = 0.0;
  return c;
}

policy::PolicySpec small_spec() {
  policy::PolicySpec s;
  s.encoder = policy::EncoderKind::kMlp;
  s.window = 8;
  s.mlp_hidden = {32};
  s.head_hidden = {16};
  return s;
}

GaitParams mid_params() { return {kPi / 4, kPi / 6, 0.5, 0.0, 0.75 * kPi, 0.75 * kPi}; }

TEST(Sinusoid, RejectsOutOfRange) {
  auto p = mid_params();
  p.A_H = 0.0;
  p.A_K = 0.0;
  try {
    sinusoid_trajectory(p, 2.0, 20.0, quiet_config());
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "params outside Table I ranges");
  }
}

TEST(Sinusoid, SamplesPerPeriodAndStart) {
  const auto p = mid_params();
  const auto x = sinusoid_trajectory(p, 2.0, 20.0, quiet_config());
  ASSERT_EQ(x.size(), 40u);
  EXPECT_EQ(x[0][0], p.theta_H0);
}

TEST(Sinusoid, ExactlyPeriodic) {
  auto cfg = quiet_config();
  for (double f : {0.4, 0.5}) {
    auto p = mid_params();
    p.f = f;
    p.phi = 1.1;
    const auto x = sinusoid_trajectory(p, 12.0, 20.0, cfg);
    const auto period = static_cast<std::size_t>(std::lround(20.0 / f));
    for (std::size_t t = 0; t + period < x.size(); ++t) {
      EXPECT_NEAR(x[t][0], x[t + period][0], 1e-12);
      EXPECT_NEAR(x[t][1], x[t + period][1], 1e-12);
    }
  }
}

TEST(Sinusoid, InPhasePeaksCoincide) {
  auto cfg = quiet_config();
  cfg.limits.swing_limit = kPi;  // no clamping plateau
  auto p = mid_params();
  p.phi = 0.0;
  const auto x = sinusoid_trajectory(p, 2.0, 20.0, cfg);
  std::size_t ih = 0, ik = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t][0] > x[ih][0]) ih = t;
    if (x[t][1] > x[ik][1]) ik = t;
  }
  EXPECT_EQ(ih, ik);
}

std::vector<int> occupancy(const std::vector<GaitParams>& s, std::size_t dim, const ParamRanges& r) {
  const int n = static_cast<int>(s.size());
  std::vector<int> bins(static_cast<std::size_t>(n), 0);
  for (const auto& p : s) {
    const auto& b = r.bounds[dim];
    const double u = (p.as_array()[dim] - b.lo) / (b.hi - b.lo);
    bins[static_cast<std::size_t>(std::min(n - 1, static_cast<int>(std::floor(u * n))))]++;
  }
  return bins;
}

TEST(Lhs, StratifiedInEveryDimension) {
  const ParamRanges r;
  for (int n : {1, 7, 10, 100, 333}) {
    for (std::uint64_t seed : {0u, 1u, 99u}) {
      const auto s = lhs_sample(n, seed, r);
      ASSERT_EQ(static_cast<int>(s.size()), n);
      for (const auto& p : s) EXPECT_TRUE(r.contains(p));
      for (std::size_t d = 0; d < 6; ++d) EXPECT_EQ(occupancy(s, d, r), std::vector<int>(static_cast<std::size_t>(n), 1));
    }
  }
}

TEST(Lhs, RejectsNonPositive) {
  EXPECT_THROW(lhs_sample(0, 1), std::invalid_argument);
  EXPECT_THROW(lhs_sample(-3, 1), std::invalid_argument);
}

TEST(Lhs, PaperScalePool) { EXPECT_EQ(lhs_sample(5000, 3).size(), 5000u); }

DemoRecord fake_record(double thrust, double lift, double a_h) {
  DemoRecord r;
  r.params = mid_params();
  r.params.A_H = a_h;
  r.mean_thrust = thrust;
  r.mean_abs_lift = lift;
  return r;
}

TEST(RankAndSelect, TwoStageRule) {
  const std::vector<DemoRecord> pool{fake_record(1, 0.1, 0.6), fake_record(3, 0.5, 0.6), fake_record(2, 0.2, 0.6)};
  const auto set = rank_and_select(pool, 2.0 / 3.0, 100.0);
  ASSERT_EQ(set.records.size(), 2u);
  EXPECT_EQ(set.records[0].mean_thrust, 3.0);
  EXPECT_EQ(set.records[1].mean_thrust, 2.0);
  EXPECT_EQ(set.bf_index, 1u);
  EXPECT_EQ(set.bf->mean_thrust, 3.0);
}

TEST(RankAndSelect, Singleton) {
  const auto set = rank_and_select({fake_record(0.5, 0.1, 0.7)}, 0.1, 50.0);
  ASSERT_EQ(set.records.size(), 1u);
  EXPECT_EQ(set.selected, std::vector<std::size_t>{0});
  EXPECT_EQ(set.bf_index, 0u);
}

TEST(RankAndSelect, EmptyPool) { EXPECT_THROW(rank_and_select({}, 0.1, 50.0), std::invalid_argument); }

TEST(RankAndSelect, TieBreaks) {
  const std::vector<DemoRecord> pool{fake_record(1, 0.3, 0.7), fake_record(1, 0.2, 0.8), fake_record(1, 0.2, 0.6)};
  const auto order = thrust_ranking(pool);
  EXPECT_EQ(order, (std::vector<std::size_t>{2, 1, 0}));
}

TEST(RankAndSelect, SubsetAndLiftBound) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<DemoRecord> pool;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) pool.push_back(fake_record(u(rng) - 0.5, u(rng), 0.55 + 0.4 * u(rng)));
    const double frac = 0.05 + 0.95 * u(rng), pct = 1.0 + 99.0 * u(rng);
    const auto set = rank_and_select(pool, frac, pct);
    std::set<std::size_t> seen;
    double best = -1e9;
    for (const auto& r : pool) best = std::max(best, r.mean_thrust);
    EXPECT_EQ(set.bf->mean_thrust, best);
    ASSERT_EQ(set.records.size(), set.selected.size());
    for (std::size_t k = 0; k < set.selected.size(); ++k) {
      ASSERT_LT(set.selected[k], pool.size());
      EXPECT_TRUE(seen.insert(set.selected[k]).second);
      EXPECT_EQ(set.records[k].mean_thrust, pool[set.selected[k]].mean_thrust);
      EXPECT_LE(set.records[k].mean_abs_lift, set.meta.lift_threshold);
    }
  }
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({5, 1, 3}, 100), 5.0);
  EXPECT_DOUBLE_EQ(percentile({5, 1, 3}, 0), 1.0);
}

DemoSet small_demo_set(const sim::SimConfig& cfg) {
  const auto params = lhs_sample(40, 3);
  std::vector<DemoRecord> pool;
  for (std::size_t i = 0; i < params.size(); ++i) pool.push_back(simulate_demo(params[i], cfg, i));
  return rank_and_select(pool, 0.1, 50.0);
}

TEST(DemoSetIo, RoundTrip) {
  testing::TempDir dir("demos");
  const auto cfg = quiet_config();
  const auto params = lhs_sample(12, 5);
  std::vector<DemoRecord> pool;
  for (std::size_t i = 0; i < params.size(); ++i) pool.push_back(simulate_demo(params[i], cfg, i));
  const auto set = rank_and_select(pool, 0.5, 50.0);
  save_demo_set(dir.path(), pool, set, "abc");
  const auto back = load_demo_set(dir.path());
  EXPECT_EQ(back.selected, set.selected);
  EXPECT_EQ(back.bf_index, set.bf_index);
  ASSERT_EQ(back.records.size(), set.records.size());
  for (std::size_t k = 0; k < set.records.size(); ++k) {
    EXPECT_EQ(back.records[k].params, set.records[k].params);
    EXPECT_EQ(back.records[k].mean_thrust, set.records[k].mean_thrust);
    EXPECT_EQ(back.records[k].trajectory.size(), set.records[k].trajectory.size());
  }
  EXPECT_EQ(back.bf->params, set.bf->params);
}

std::string param_hash(const policy::ActorCritic<float>& p) {
  const auto& v = p.params().values();
  return util::sha1_hex(std::string_view(reinterpret_cast<const char*>(v.data()), sizeof(float) * v.size()));
}

TEST(BehaviorClone, ZeroEpochsIsNoOp) {
  const auto set = small_demo_set(quiet_config());
  policy::ActorCritic<float> pol(small_spec(), 1);
  const auto before = param_hash(pol);
  BcOptions o;
  o.epochs = 0;
  behavior_clone(pol, set, o);
  EXPECT_EQ(param_hash(pol), before);
}

TEST(BehaviorClone, FitsConstantAction) {
  auto set = small_demo_set(quiet_config());
  set.records.resize(1);
  const auto spec = small_spec();
  const cmdp::JointVector a_star(0.02, -0.01);
  for (auto& tr : set.records[0].trajectory.transitions) tr.action.joint_deltas = a_star;
  policy::ActorCritic<float> pol(spec, 2);
  BcOptions o;
  o.epochs = 400;
  o.learning_rate = 3e-3;
  behavior_clone(pol, set, o);
  const auto ds = make_bc_dataset(spec, set);
  const auto out = pol.forward(ds.inputs);
  const double rmse = std::sqrt(static_cast<double>((out.mean - ds.actions).squaredNorm()) / ds.actions.size());
  EXPECT_LT(rmse, 1e-3);
}

TEST(BehaviorClone, LossCurveNearlyMonotone) {
  const auto set = small_demo_set(quiet_config());
  policy::ActorCritic<float> pol(small_spec(), 3);
  BcOptions o;
  o.epochs = 40;
  const auto res = behavior_clone(pol, set, o);
  ASSERT_EQ(res.loss_curve.size(), 40u);
  double best = res.loss_curve.front();
  for (double l : res.loss_curve) {
    EXPECT_LE(l, 1.05 * best);
    best = std::min(best, l);
  }
  EXPECT_LT(res.loss_curve.back(), res.loss_curve.front());
}

TEST(BehaviorClone, ShapeMismatch) {
  const auto set = small_demo_set(quiet_config());
  auto spec = small_spec();
  spec.features.phase_clock = true;
  policy::ActorCritic<float> pol(spec, 1);
  try {
    behavior_clone(pol, set);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "demo observations do not match the policy input");
  }
}

TEST(BehaviorClone, ReplayRegression) {
  const auto cfg = quiet_config();
  const auto set = small_demo_set(cfg);
  policy::ActorCritic<float> pol(small_spec(), 4);
  const auto res = behavior_clone(pol, set);
  const double rmse = replay_rmse(pol, set.records.front(), cfg, 0);
  EXPECT_NEAR(rmse, kFrozenReplayRmse, 1e-9);
  EXPECT_LE(res.rmse, res.warning ? 1e9 : BcOptions{}.rmse_threshold);
}

}  // namespace
}  // namespace paddle::gait
