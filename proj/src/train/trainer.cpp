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

#include "paddle/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"
#include "paddle/util/seed.hpp"

namespace paddle::train {

namespace {

enum SeedStream : std::uint64_t { kEnvStream = 0, kActionStream = 1, kShuffleStream = 2, kEvalStream = 3 };

float to_network_units(double action_rad, double scale) { return static_cast<float>(action_rad / scale); }

}  // namespace

std::vector<std::string> metrics_row(const EpisodeMetrics& m) {
  using util::format_double;
  return {std::to_string(m.episode),  format_double(m.undiscounted_reward), format_double(m.avg_cost),
          format_double(m.lambda),    format_double(m.f_star),              std::to_string(m.H),
          format_double(m.L_step),    format_double(m.L_cyc),               format_double(m.L_actor),
          format_double(m.L_value_r), format_double(m.L_value_c),           format_double(m.clip_upper),
          format_double(m.clip_lower), format_double(m.clip_widened)};
}

Rollout collect_rollout(const Policy& policy, sim::LimbSimulator& env, std::uint64_t env_seed, std::mt19937_64* rng) {
  const auto& spec = policy.spec();
  const int steps = env.config().episode_steps;
  Rollout r;
  r.history.reserve(static_cast<std::size_t>(steps) + 1);
  r.history.push_back(env.reset(env_seed));
  auto& traj = r.trajectory;
  traj.transitions.reserve(static_cast<std::size_t>(steps));
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < steps; ++t) {
    const auto window = policy::encode_window<float>(spec, r.history, static_cast<std::size_t>(t));
    const auto out = policy.forward(window);
    cmdp::Transition tr;
    tr.obs = r.history.back();
    tr.step_index = t;
    policy::ActionDistribution<float> dist{out.mean.col(0), out.log_std.array().exp().matrix()};
    Eigen::VectorXf a_net(spec.act_dim);
    for (int i = 0; i < spec.act_dim; ++i) {
      double a = static_cast<double>(dist.mean[i]);
      if (rng) a += static_cast<double>(dist.std[i]) * unit(*rng);
      tr.action.joint_deltas[i] = a * spec.action_scale;
      a_net[i] = to_network_units(tr.action.joint_deltas[i], spec.action_scale);
    }
    tr.logp_behavior = static_cast<double>(policy::log_prob(dist, a_net));
    const auto outcome = env.step(tr.action);
    tr.reward = outcome.reward;
    tr.lift = outcome.lift;
    tr.done = t + 1 == steps;
    traj.transitions.push_back(tr);
    r.history.push_back(outcome.obs);
  }
  traj.terminal_obs = r.history.back();
  return r;
}

CycleResult cycle_from_lift(const cmdp::Trajectory& traj, double f_s, const CycleOptions& opts, int fallback) {
  CycleResult res;
  const auto lift = traj.lifts();
  try {
    const auto est = detect_cycle(lift, f_s, opts);
    res.H = est.H;
    res.f_star = est.f_star;
    res.detected = true;
  } catch (const NoDominantFrequency&) {
    res.H = fallback;
  } catch (const std::invalid_argument&) {
    // record too short for a spectrum
    res.H = fallback;
  }
  return res;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

std::pair<double, double> score_trajectory(cmdp::Trajectory traj, double f_s, const CycleOptions& cycle,
                                           int fallback_H) {
  const auto c = cycle_from_lift(traj, f_s, cycle, fallback_H);
  cmdp::recompute_costs(traj, c.H);
  const auto s = cmdp::discounted_summary(traj, 1.0);
  return {s.undiscounted_reward, s.undiscounted_cost_mean};
}

EvalResult evaluate_policy(const Policy& policy, const sim::SimConfig& config, int n_rollouts, std::uint64_t seed,
                           const CycleOptions& cycle) {
  if (n_rollouts < 1) throw std::invalid_argument("need at least one evaluation rollout");
  sim::LimbSimulator env(config, seed);
  EvalResult res;
  const int fallback = fallback_cycle_length(config.control_rate);
  for (int k = 0; k < n_rollouts; ++k) {
    auto r = collect_rollout(policy, env, util::derive_seed(seed, kEvalStream, static_cast<std::uint64_t>(k)), nullptr);
    const auto [reward, cost] = score_trajectory(std::move(r.trajectory), config.control_rate, cycle, fallback);
    res.rewards.push_back(reward);
    res.costs.push_back(cost);
  }
  std::tie(res.reward_mean, res.reward_std) = mean_std(res.rewards);
  std::tie(res.cost_mean, res.cost_std) = mean_std(res.costs);
  return res;
}

Trainer::Trainer(Policy policy, sim::SimConfig sim_config, LagrangeState lagrange, ClipSchedule sched,
                 AlgoVariant variant, TrainOptions opts, std::uint64_t seed)
    : policy_(std::move(policy)),
      sim_config_(std::move(sim_config)),
      env_(sim_config_, seed),
      lagrange_(lagrange),
      sched_(sched),
      variant_(variant),
      rules_(variant_rules(variant, sched)),
      opts_(opts),
      adam_(policy_.num_params(), opts.adam),
      seed_(seed) {
  lagrange_.validate();
  if (opts_.epochs < 0 || opts_.minibatch < 1) throw std::invalid_argument("invalid optimisation schedule");
  if (rules_.multiplier == MultiplierRule::kZero) lagrange_.lambda = 0.0;
  last_H_ = fallback_cycle_length(sim_config_.control_rate);
}

Rollout Trainer::collect() {
  std::mt19937_64 rng(util::derive_seed(seed_, kActionStream, static_cast<std::uint64_t>(episode_)));
  return collect_rollout(policy_, env_, util::derive_seed(seed_, kEnvStream, static_cast<std::uint64_t>(episode_)),
                         &rng);
}

PreparedBatch Trainer::prepare(Rollout rollout) {
  auto& traj = rollout.trajectory;
  const auto n = static_cast<Eigen::Index>(traj.size());
  if (n == 0) throw std::invalid_argument("empty trajectory");
  PreparedBatch batch;
  batch.cycle = cycle_from_lift(traj, sim_config_.control_rate, opts_.cycle, last_H_);
  last_H_ = batch.cycle.H;
  cmdp::recompute_costs(traj, batch.cycle.H);
  cmdp::segment_cycles(traj, batch.cycle.H);

  const auto summary = cmdp::discounted_summary(traj, opts_.advantage.gamma);
  batch.undiscounted_reward = summary.undiscounted_reward;
  batch.avg_cost = summary.undiscounted_cost_mean;
  batch.discounted_cost = summary.cost_J_C;

  std::vector<double> rewards = traj.rewards();
  std::vector<double> costs = traj.costs();
  for (std::size_t t = 0; t < rewards.size(); ++t) rewards[t] -= rules_.reward_cost_penalty * costs[t];
  if (rules_.ignore_cost) std::fill(costs.begin(), costs.end(), 0.0);

  const auto& spec = policy_.spec();
  Matrix<float> windows(spec.input_dim(), n + 1);
  for (Eigen::Index t = 0; t <= n; ++t) {
    windows.col(t) = policy::encode_window<float>(spec, rollout.history, static_cast<std::size_t>(t));
  }
  const auto out = policy_.forward(windows);
  const Eigen::VectorXd V_r = out.value_r.transpose().cast<double>();
  const Eigen::VectorXd V_c = out.value_c.transpose().cast<double>();
  const double lambda = rules_.multiplier == MultiplierRule::kZero ? 0.0 : lagrange_.lambda;
  batch.advantages = dual_gae(rewards, costs, V_r, V_c, lambda, opts_.advantage);

  auto& d = batch.data;
  d.inputs = windows.leftCols(n);
  d.actions.resize(spec.act_dim, n);
  d.logp_old.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& tr = traj.transitions[static_cast<std::size_t>(t)];
    for (int i = 0; i < spec.act_dim; ++i) d.actions(i, t) = to_network_units(tr.action.joint_deltas[i], spec.action_scale);
    d.logp_old[t] = static_cast<float>(tr.logp_behavior);
  }
  d.A_lambda = batch.advantages.A_lambda.cast<float>();
  d.A_r = batch.advantages.A_r;
  d.A_c = batch.advantages.A_c;
  d.returns_r = batch.advantages.returns_r.cast<float>();
  d.returns_c = batch.advantages.returns_c.cast<float>();
  d.segments = traj.cycle_segments;
  d.episode = episode_;
  return batch;
}

namespace {

struct Unit {
  Eigen::Index begin = 0;
  Eigen::Index length = 0;
  bool cycle = false;
};

MinibatchData<float> gather(const MinibatchData<float>& all, const std::vector<Unit>& units) {
  Eigen::Index size = 0;
  for (const auto& u : units) size += u.length;
  MinibatchData<float> mb;
  mb.inputs.resize(all.inputs.rows(), size);
  mb.actions.resize(all.actions.rows(), size);
  mb.logp_old.resize(size);
  mb.A_lambda.resize(size);
  mb.A_r.resize(size);
  mb.A_c.resize(size);
  mb.returns_r.resize(size);
  mb.returns_c.resize(size);
  mb.episode = all.episode;
  Eigen::Index pos = 0;
  for (const auto& u : units) {
    mb.inputs.middleCols(pos, u.length) = all.inputs.middleCols(u.begin, u.length);
    mb.actions.middleCols(pos, u.length) = all.actions.middleCols(u.begin, u.length);
    mb.logp_old.segment(pos, u.length) = all.logp_old.segment(u.begin, u.length);
    mb.A_lambda.segment(pos, u.length) = all.A_lambda.segment(u.begin, u.length);
    mb.A_r.segment(pos, u.length) = all.A_r.segment(u.begin, u.length);
    mb.A_c.segment(pos, u.length) = all.A_c.segment(u.begin, u.length);
    mb.returns_r.segment(pos, u.length) = all.returns_r.segment(u.begin, u.length);
    mb.returns_c.segment(pos, u.length) = all.returns_c.segment(u.begin, u.length);
    if (u.cycle) {
      mb.segments.push_back({static_cast<std::size_t>(pos), static_cast<std::size_t>(u.length)});
    }
    pos += u.length;
  }
  return mb;
}

}  // namespace

UpdateStats Trainer::optimize(const PreparedBatch& batch) {
  const auto& all = batch.data;
  const Eigen::Index n = all.size();
  // whole cycles stay together so the cycle term sees complete segments
  std::vector<Unit> units;
  Eigen::Index covered = 0;
  for (const auto& s : all.segments) {
    units.push_back({static_cast<Eigen::Index>(s.begin), static_cast<Eigen::Index>(s.length), true});
    covered = std::max(covered, static_cast<Eigen::Index>(s.end()));
  }
  for (Eigen::Index t = covered; t < n; ++t) units.push_back({t, 1, false});

  const auto snapshot = policy_.params().values();
  const auto adam_snapshot = adam_.state();
  std::mt19937_64 rng(util::derive_seed(seed_, kShuffleStream, static_cast<std::uint64_t>(episode_)));

  UpdateStats stats;
  int count = 0;
  nn::Vector<float> grad;
  for (int epoch = 0; epoch < opts_.epochs; ++epoch) {
    std::shuffle(units.begin(), units.end(), rng);
    std::size_t next = 0;
    while (next < units.size()) {
      std::vector<Unit> chosen;
      Eigen::Index size = 0;
      while (next < units.size() && size < opts_.minibatch) {
        chosen.push_back(units[next]);
        size += units[next].length;
        ++next;
      }
      const auto mb = gather(all, chosen);
      const auto loss = minibatch_objective<float>(policy_, mb, sched_, rules_, opts_.coefficients,
                                                   opts_.cycle_clip, &grad);
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        policy_.params().values() = snapshot;
        adam_.state() = adam_snapshot;
        throw NumericalAbort("non-finite loss at episode " + std::to_string(episode_) + "; update rolled back");
      }
      adam_.step(policy_.params(), grad);
      stats.L_step += loss.actor.step;
      stats.L_cyc += loss.actor.cycle;
      stats.L_actor += loss.actor.loss;
      stats.L_value_r += loss.value_r;
      stats.L_value_c += loss.value_c;
      stats.clip_upper += loss.actor.stats.upper;
      stats.clip_lower += loss.actor.stats.lower;
      stats.clip_widened += loss.actor.stats.widened;
      ++count;
    }
  }
  if (!policy_.params().values().allFinite()) {
    policy_.params().values() = snapshot;
    adam_.state() = adam_snapshot;
    throw NumericalAbort("non-finite parameters at episode " + std::to_string(episode_) + "; update rolled back");
  }
  if (count > 0) {
    const double k = count;
    stats.L_step /= k;
    stats.L_cyc /= k;
    stats.L_actor /= k;
    stats.L_value_r /= k;
    stats.L_value_c /= k;
    stats.clip_upper /= k;
    stats.clip_lower /= k;
    stats.clip_widened /= k;
  }
  return stats;
}

void Trainer::update_multiplier(double cost_estimate) {
  switch (rules_.multiplier) {
    case MultiplierRule::kPid:
      lagrange_ = pid_update(lagrange_, cost_estimate);
      break;
    case MultiplierRule::kZero:
      lagrange_.lambda = 0.0;
      break;
    case MultiplierRule::kFrozen:
      break;
  }
}

EpisodeMetrics Trainer::iterate() {
  auto batch = prepare(collect());
  const auto stats = optimize(batch);
  const double estimate =
      opts_.cost_estimator == CostEstimator::kAverage ? batch.avg_cost : batch.discounted_cost;
  update_multiplier(estimate);

  EpisodeMetrics m;
  m.episode = episode_;
  m.undiscounted_reward = batch.undiscounted_reward;
  m.avg_cost = batch.avg_cost;
  m.lambda = lagrange_.lambda;
  m.f_star = batch.cycle.f_star;
  m.H = batch.cycle.H;
  m.cycle_detected = batch.cycle.detected;
  m.L_step = stats.L_step;
  m.L_cyc = stats.L_cyc;
  m.L_actor = stats.L_actor;
  m.L_value_r = stats.L_value_r;
  m.L_value_c = stats.L_value_c;
  m.clip_upper = stats.clip_upper;
  m.clip_lower = stats.clip_lower;
  m.clip_widened = stats.clip_widened;
  m.J_C_hat = estimate;
  ++episode_;
  return m;
}

}  // namespace paddle::train
