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

#include "paddle/gait/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "paddle/cmdp/trajectory_io.hpp"
#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"

namespace paddle::gait {

bool ParamRanges::contains(const GaitParams& p) const {
  const auto v = p.as_array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !bounds[i].contains(v[i])) return false;
  }
  return true;
}

void ParamRanges::validate() const {
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.hi < b.lo) {
      throw std::invalid_argument("invalid parameter range");
    }
  }
  if (bounds[2].lo <= 0.0) throw std::invalid_argument("frequency range must be positive");
}

std::vector<JointVector> sinusoid_trajectory(const GaitParams& params, double duration, double f_s,
                                             const sim::SimConfig& config, const ParamRanges& ranges) {
  if (!ranges.contains(params)) throw std::invalid_argument("params outside Table I ranges");
  if (!(f_s > 2.0 * params.f)) throw std::invalid_argument("sampling rate must exceed twice the gait frequency");
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  const auto n = static_cast<std::size_t>(std::floor(duration * f_s));
  std::vector<JointVector> out;
  out.reserve(n);
  const double w = 2.0 * std::numbers::pi * params.f;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / f_s;
    JointVector th(params.A_H * std::sin(w * t) + params.theta_H0,
                   params.A_K * std::sin(w * t + params.phi) + params.theta_K0);
    out.push_back(sim::clamp_to_swing(th, config));
  }
  return out;
}

std::vector<GaitParams> lhs_sample(int n, std::uint64_t seed, const ParamRanges& ranges) {
  if (n <= 0) throw std::invalid_argument("sample count must be positive");
  ranges.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 6>> values(static_cast<std::size_t>(n));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (std::size_t d = 0; d < 6; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto& b = ranges.bounds[d];
    for (std::size_t i = 0; i < values.size(); ++i) {
      // keep clear of bin edges so rounding never moves a sample across
      const double u = 1e-6 + (1.0 - 2e-6) * unit(rng);
      values[i][d] = b.lo + (perm[i] + u) / n * b.width();
    }
  }
  std::vector<GaitParams> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(GaitParams::from_array(v));
  return out;
}

namespace {

int gait_cycle_steps(double f, double f_s) {
  return std::max(2, cmdp::even_cycle_length(static_cast<int>(std::floor(f_s / f))));
}

}  // namespace

DemoRecord simulate_demo(const GaitParams& params, const sim::SimConfig& config, std::uint64_t seed,
                         const ParamRanges& ranges) {
  const int steps = config.episode_steps;
  const double f_s = config.control_rate;
  // target for step t is the sinusoid sample at t + 1
  const auto targets = sinusoid_trajectory(params, (steps + 1) / f_s + 0.5 / f_s, f_s, config, ranges);

  sim::LimbSimulator env(config, seed);
  cmdp::Observation obs = env.reset(seed);
  DemoRecord rec;
  rec.params = params;
  auto& traj = rec.trajectory;
  traj.transitions.reserve(static_cast<std::size_t>(steps));
  const double dmax = config.limits.delta_limit;
  double thrust = 0.0, abs_lift = 0.0;
  for (int t = 0; t < steps; ++t) {
    cmdp::Transition tr;
    tr.obs = obs;
    tr.step_index = t;
    const JointVector desired = targets[static_cast<std::size_t>(t + 1)] - env.state().theta;
    tr.action.joint_deltas = desired.cwiseMax(-dmax).cwiseMin(dmax);
    const auto out = env.step(tr.action);
    tr.reward = out.reward;
    tr.lift = out.lift;
    tr.done = t + 1 == steps;
    thrust += env.state().filtered_forces[0];
    abs_lift += std::abs(out.lift);
    traj.transitions.push_back(tr);
    obs = out.obs;
  }
  traj.terminal_obs = obs;
  rec.mean_thrust = thrust / steps;
  rec.mean_abs_lift = abs_lift / steps;
  cmdp::recompute_costs(traj, gait_cycle_steps(params.f, f_s));
  return rec;
}

std::vector<std::size_t> thrust_ranking(const std::vector<DemoRecord>& pool) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = pool[a];
    const auto& rb = pool[b];
    if (ra.mean_thrust != rb.mean_thrust) return ra.mean_thrust > rb.mean_thrust;
    if (ra.mean_abs_lift != rb.mean_abs_lift) return ra.mean_abs_lift < rb.mean_abs_lift;
    return ra.params.as_array() < rb.params.as_array();
  });
  return order;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

DemoSet rank_and_select(const std::vector<DemoRecord>& pool, double top_thrust_fraction, double lift_percentile) {
  if (pool.empty()) throw std::invalid_argument("empty demo pool");
  if (!(top_thrust_fraction > 0.0 && top_thrust_fraction <= 1.0) ||
      !(lift_percentile > 0.0 && lift_percentile <= 100.0)) {
    throw std::invalid_argument("selection fractions must lie in (0, 1]");
  }
  const auto order = thrust_ranking(pool);
  const auto keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(top_thrust_fraction * static_cast<double>(pool.size()) - 1e-9)), 1,
      pool.size());
  std::vector<double> lifts;
  for (std::size_t i = 0; i < keep; ++i) lifts.push_back(pool[order[i]].mean_abs_lift);

  DemoSet set;
  set.meta = {top_thrust_fraction, lift_percentile, percentile(lifts, lift_percentile), pool.size()};
  for (std::size_t i = 0; i < keep; ++i) {
    if (pool[order[i]].mean_abs_lift <= set.meta.lift_threshold) {
      set.selected.push_back(order[i]);
      set.records.push_back(pool[order[i]]);
    }
  }
  set.bf_index = order.front();
  set.bf = pool[order.front()];
  return set;
}

namespace {

std::string demo_file_name(std::size_t index) { return "demo_" + std::to_string(index) + ".csv"; }

}  // namespace

void save_demo_set(const std::filesystem::path& dir, const std::vector<DemoRecord>& pool, const DemoSet& set,
                   const std::string& fingerprint) {
  std::vector<std::string> cols(std::begin(kDemoIndexColumns), std::end(kDemoIndexColumns));
  util::CsvTable index(cols);
  index.add_comment("fingerprint=" + fingerprint);
  index.add_comment("top_thrust_fraction=" + util::format_double(set.meta.top_thrust_fraction) +
                    " lift_percentile=" + util::format_double(set.meta.lift_percentile) +
                    " lift_threshold=" + util::format_double(set.meta.lift_threshold));
  std::vector<long long> rank(pool.size(), -1);
  for (std::size_t k = 0; k < set.selected.size(); ++k) rank.at(set.selected[k]) = static_cast<long long>(k);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& r = pool[i];
    std::vector<std::string> row{std::to_string(i)};
    for (double v : r.params.as_array()) row.push_back(util::format_double(v));
    row.push_back(util::format_double(r.mean_thrust));
    row.push_back(util::format_double(r.mean_abs_lift));
    row.push_back(rank[i] >= 0 ? "1" : "0");
    row.push_back(std::to_string(rank[i]));
    row.push_back(i == set.bf_index ? "1" : "0");
    index.add_row(std::move(row));
  }
  index.save(dir / "index.csv");
  for (std::size_t k = 0; k < set.selected.size(); ++k) {
    cmdp::save_trajectory(dir / demo_file_name(set.selected[k]), set.records[k].trajectory);
  }
  if (set.bf) {
    const bool bf_saved = std::find(set.selected.begin(), set.selected.end(), set.bf_index) != set.selected.end();
    if (!bf_saved) cmdp::save_trajectory(dir / demo_file_name(set.bf_index), set.bf->trajectory);
  }
}

DemoSet load_demo_set(const std::filesystem::path& dir) {
  const auto index = util::load_csv(dir / "index.csv");
  DemoSet set;
  const auto c_sel = index.column("selected");
  const auto c_rank = index.column("selection_rank");
  const auto c_bf = index.column("is_BF");
  const auto c_idx = index.column("pool_index");
  const auto c_thrust = index.column("mean_thrust");
  const auto c_lift = index.column("mean_abs_lift");
  const char* names[] = {"A_H", "A_K", "f", "phi", "theta_H0", "theta_K0"};
  set.meta.pool_size = index.rows.size();
  struct Ranked {
    long long rank;
    std::size_t pool_index;
    DemoRecord rec;
  };
  std::vector<Ranked> ranked;
  for (const auto& row : index.rows) {
    const bool sel = row[c_sel] == "1";
    const bool bf = row[c_bf] == "1";
    if (!sel && !bf) continue;
    DemoRecord rec;
    std::array<double, 6> p{};
    for (std::size_t d = 0; d < 6; ++d) p[d] = util::parse_double(row[index.column(names[d])]);
    rec.params = GaitParams::from_array(p);
    rec.mean_thrust = util::parse_double(row[c_thrust]);
    rec.mean_abs_lift = util::parse_double(row[c_lift]);
    const auto pool_index = static_cast<std::size_t>(util::parse_int(row[c_idx]));
    rec.trajectory = cmdp::load_trajectory(dir / demo_file_name(pool_index));
    if (bf) {
      set.bf_index = pool_index;
      set.bf = rec;
    }
    if (sel) ranked.push_back({util::parse_int(row[c_rank]), pool_index, std::move(rec)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) { return a.rank < b.rank; });
  for (auto& r : ranked) {
    set.selected.push_back(r.pool_index);
    set.records.push_back(std::move(r.rec));
  }
  if (set.records.empty()) throw IoError("demo set in " + dir.string() + " has no selected records");
  return set;
}

sim::GaitPrimitive gait_primitive_from_params(const GaitParams& params, const sim::SimConfig& config,
                                              const ParamRanges& ranges) {
  const double f_s = config.control_rate;
  const int H = gait_cycle_steps(params.f, f_s);
  // record the tracked joint angles over the final full period of an episode
  sim::SimConfig quiet = config;
  quiet.noise.force_sigma = 0.0;
  quiet.noise.moment_sigma = 0.0;
  const auto rec = simulate_demo(params, quiet, 0, ranges);
  const auto& tr = rec.trajectory.transitions;
  if (static_cast<int>(tr.size()) < H + 1) throw std::invalid_argument("episode shorter than one gait period");
  sim::GaitPrimitive gait;
  gait.control_rate = f_s;
  for (std::size_t t = tr.size() - static_cast<std::size_t>(H); t < tr.size(); ++t) {
    const auto& next = t + 1 < tr.size() ? tr[t + 1].obs : *rec.trajectory.terminal_obs;
    gait.angles.push_back(next.joint_angles);
  }
  return gait;
}

}  // namespace paddle::gait
