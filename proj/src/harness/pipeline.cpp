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

#include "paddle/harness/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <map>
#include <sstream>

#include "paddle/errors.hpp"
#include "paddle/gait/behavior_clone.hpp"
#include "paddle/policy/checkpoint.hpp"
#include "paddle/util/csv.hpp"
#include "paddle/util/hash.hpp"
#include "paddle/util/seed.hpp"

namespace paddle::harness {

namespace fs = std::filesystem;
using util::format_double;

namespace {

// Seed streams owned by the harness (the trainer uses 0..3).
enum HarnessStream : std::uint64_t { kEvalStream = 3, kCaptureStream = 4, kPoolStream = 20, kInitStream = 30 };

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest start_manifest(const std::string& command, const RunConfig& config) {
  RunManifest m;
  m.command = command;
  m.fingerprint = config.fingerprint();
  m.seed = config.seed;
  m.variant = std::string(train::variant_name(config.variant));
  m.started = utc_now();
  return m;
}

void finish(RunManifest& m, const fs::path& out) {
  m.finished = utc_now();
  m.save(out);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::vector<std::string> columns(const auto& names) { return {std::begin(names), std::end(names)}; }

std::string fingerprint_comment(const std::string& fp) { return "fingerprint=" + fp; }

// Value of "key=value" tokens in CSV comment lines.
std::optional<std::string> comment_value(const util::ParsedCsv& csv, const std::string& key) {
  for (const auto& c : csv.comments) {
    std::istringstream ss(c);
    std::string tok;
    while (ss >> tok) {
      if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
    }
  }
  return std::nullopt;
}

void check_fingerprint(const std::string& found, const std::string& expected, const std::string& what, bool force,
                       RunManifest& m) {
  if (found == expected) return;
  const std::string msg = what + " fingerprint " + found + " does not match config fingerprint " + expected;
  if (!force) throw ConfigError(msg);
  m.summary["warnings"].push_back(msg + " (forced)");
}

void save_primitive(const fs::path& path, const sim::GaitPrimitive& gait, const std::string& fp) {
  util::write_text_file(path, "# " + fingerprint_comment(fp) + "\n" + sim::gait_primitive_to_text(gait));
}

train::Policy load_policy(const RunConfig& config, const fs::path& path, bool force, RunManifest& m,
                          policy::Checkpoint* raw = nullptr) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  auto ckpt = policy::load_checkpoint(path, config.fingerprint(), force);
  for (const auto& w : ckpt.warnings) m.summary["warnings"].push_back(w);
  if (ckpt.spec.fingerprint() != config.policy.fingerprint()) {
    throw ConfigError("checkpoint architecture does not match the configured policy");
  }
  auto policy = policy::policy_from_checkpoint<float>(ckpt);
  if (raw) *raw = std::move(ckpt);
  return policy;
}

policy::Checkpoint trainer_checkpoint(const train::Trainer& tr, const std::string& fp) {
  auto ckpt = policy::make_checkpoint(tr.policy(), fp);
  policy::put_adam_state(ckpt, tr.optimizer().state());
  const auto& lag = tr.lagrange();
  ckpt.put("lagrange/state", {static_cast<float>(lag.lambda), static_cast<float>(lag.integral_sum),
                              static_cast<float>(lag.prev_violation)});
  ckpt.put("train/episode", {static_cast<float>(tr.episode())});
  return ckpt;
}

void restore_trainer(train::Trainer& tr, const policy::Checkpoint& ckpt) {
  if (auto st = policy::get_adam_state<float>(ckpt); st && st->m.size() == tr.policy().params().size()) {
    tr.optimizer().state() = *st;
  }
  if (const auto* lag = ckpt.find("lagrange/state"); lag && lag->data.size() == 3) {
    tr.lagrange().lambda = lag->data[0];
    tr.lagrange().integral_sum = lag->data[1];
    tr.lagrange().prev_violation = lag->data[2];
  }
  if (const auto* ep = ckpt.find("train/episode"); ep && ep->data.size() == 1) {
    tr.set_episode(static_cast<int>(ep->data[0]));
  }
}

fs::path demo_dir_or_default(const RunConfig& config, const std::optional<fs::path>& dir) {
  return dir ? *dir : config.out / files::kDemoDir;
}

}  // namespace

void RunManifest::add(std::string role, const fs::path& path) {
  artifacts.push_back(Artifact{std::move(role), path, util::git_blob_hash_file(path)});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["fingerprint"] = fingerprint;
  j["seed"] = seed;
  j["variant"] = variant;
  j["started"] = started;
  j["finished"] = finished;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : artifacts) {
    j["artifacts"].push_back({{"role", a.role}, {"path", a.path.string()}, {"hash", a.hash}});
  }
  j["summary"] = summary;
  return j;
}

void RunManifest::save(const fs::path& out_dir) const {
  util::write_text_file(out_dir / ("manifest_" + command + ".json"), to_json().dump(2) + "\n");
}

RunManifest cmd_search(const RunConfig& config) {
  config.validate();
  auto m = start_manifest("search", config);
  ensure_dir(config.out);
  const auto params = gait::lhs_sample(config.search.pool_size, config.seed, config.ranges);
  std::vector<gait::DemoRecord> pool;
  pool.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    pool.push_back(gait::simulate_demo(params[i], config.sim, util::derive_seed(config.seed, kPoolStream, i),
                                       config.ranges));
  }
  const auto set = gait::rank_and_select(pool, config.search.top_thrust_fraction, config.search.lift_percentile);
  const auto dir = config.out / files::kDemoDir;
  ensure_dir(dir);
  gait::save_demo_set(dir, pool, set, m.fingerprint);
  m.add("demo_index", dir / "index.csv");

  const auto bf_path = config.out / files::kBfGait;
  save_primitive(bf_path, gait::gait_primitive_from_params(set.bf->params, config.sim, config.ranges),
                 m.fingerprint);
  m.add("bf_gait", bf_path);

  std::vector<double> thrust;
  for (const auto& r : pool) thrust.push_back(r.mean_thrust);
  const auto positive = std::count_if(thrust.begin(), thrust.end(), [](double t) { return t > 0.0; });
  util::CsvTable stats({"statistic", "value"});
  stats.add_comment(fingerprint_comment(m.fingerprint));
  stats.add_row({"pool_size", std::to_string(pool.size())});
  stats.add_row({"selected", std::to_string(set.selected.size())});
  stats.add_row({"positive_thrust", std::to_string(positive)});
  stats.add_row({"thrust_min", format_double(*std::min_element(thrust.begin(), thrust.end()))});
  stats.add_row({"thrust_mean", format_double(train::mean_std(thrust).first)});
  stats.add_row({"thrust_max", format_double(*std::max_element(thrust.begin(), thrust.end()))});
  stats.add_row({"lift_threshold", format_double(set.meta.lift_threshold)});
  stats.add_row({"bf_index", std::to_string(set.bf_index)});
  stats.add_row({"bf_thrust", format_double(set.bf->mean_thrust)});
  stats.add_row({"bf_abs_lift", format_double(set.bf->mean_abs_lift)});
  stats.save(config.out / files::kPoolStats);
  m.add("pool_stats", config.out / files::kPoolStats);

  m.summary["pool_size"] = pool.size();
  m.summary["selected"] = set.selected.size();
  m.summary["positive_thrust"] = positive;
  m.summary["bf_thrust"] = set.bf->mean_thrust;
  finish(m, config.out);
  return m;
}

RunManifest cmd_pretrain(const RunConfig& config, const std::optional<fs::path>& demo_dir, bool force) {
  config.validate();
  auto m = start_manifest("pretrain", config);
  const auto dir = demo_dir_or_default(config, demo_dir);
  if (!fs::exists(dir / "index.csv")) throw IoError("demo dataset not found in " + dir.string());
  const auto index = util::load_csv(dir / "index.csv");
  check_fingerprint(comment_value(index, "fingerprint").value_or("none"), m.fingerprint, "demo set", force, m);
  const auto set = gait::load_demo_set(dir);
  ensure_dir(config.out);

  train::Policy policy(config.policy, util::derive_seed(config.seed, kInitStream, 0));
  auto opts = config.pretrain;
  opts.seed = config.seed;
  const auto bc = gait::behavior_clone(policy, set, opts);

  const auto ckpt_path = config.out / files::kPretrainCheckpoint;
  policy::save_checkpoint(ckpt_path, policy::make_checkpoint(policy, m.fingerprint));
  m.add("checkpoint", ckpt_path);

  util::CsvTable loss({"epoch", "loss"});
  loss.add_comment(fingerprint_comment(m.fingerprint));
  loss.add_comment("rmse_rad=" + format_double(bc.rmse));
  for (std::size_t e = 0; e < bc.loss_curve.size(); ++e) loss.add_row({std::to_string(e), format_double(bc.loss_curve[e])});
  loss.save(config.out / files::kBcLoss);
  m.add("bc_loss", config.out / files::kBcLoss);

  m.summary["demos"] = set.records.size();
  m.summary["rmse_deg"] = bc.rmse / sim::kDegree;
  if (bc.warning) m.summary["warnings"].push_back("replay RMSE above threshold");
  finish(m, config.out);
  return m;
}

RunManifest cmd_train(const RunConfig& config, const std::optional<fs::path>& init, bool force) {
  config.validate();
  auto m = start_manifest("train", config);
  const auto rules = train::variant_rules(config.variant, config.clip);
  if (rules.multiplier == train::MultiplierRule::kPid && !config.cost_limit_set) {
    throw ConfigError("lagrange.cost_limit must be set for " + m.variant);
  }
  ensure_dir(config.out);

  policy::Checkpoint input;
  train::Policy policy;
  if (init || !config.from_scratch) {
    const auto path = init ? *init : config.out / files::kPretrainCheckpoint;
    policy = load_policy(config, path, force, m, &input);
    m.summary["init"] = path.string();
  } else {
    policy = train::Policy(config.policy, util::derive_seed(config.seed, kInitStream, 1));
    input = policy::make_checkpoint(policy, m.fingerprint);
    m.summary["init"] = "scratch";
  }

  train::LagrangeState lagrange = config.effective_lagrange();
  train::Trainer tr(std::move(policy), config.sim, lagrange, config.clip, config.variant, config.optim, config.seed);
  restore_trainer(tr, input);

  util::CsvTable metrics(columns(train::kMetricsColumns));
  metrics.add_comment(fingerprint_comment(m.fingerprint));
  metrics.add_comment("variant=" + m.variant);
  metrics.add_comment("seed=" + std::to_string(config.seed));
  metrics.add_comment(std::string("init=") + (config.from_scratch && !init ? "scratch" : "checkpoint"));

  const auto ckpt_path = config.out / files::kPolicyCheckpoint;
  const auto metrics_path = config.out / files::kMetrics;
  auto write_outputs = [&](bool trained) {
    // a zero budget hands the input checkpoint back untouched
    policy::save_checkpoint(ckpt_path, trained ? trainer_checkpoint(tr, m.fingerprint) : input);
    metrics.save(metrics_path);
    m.artifacts.clear();
    m.add("checkpoint", ckpt_path);
    m.add("metrics", metrics_path);
  };

  train::EpisodeMetrics last;
  int done = 0;
  try {
    for (; done < config.episodes; ++done) {
      last = tr.iterate();
      metrics.add_row(train::metrics_row(last));
    }
  } catch (const NumericalAbort& e) {
    write_outputs(done > 0);
    m.summary["aborted"] = e.what();
    m.summary["episodes"] = done;
    finish(m, config.out);
    throw;
  }
  write_outputs(done > 0);
  m.summary["episodes"] = done;
  if (done > 0) {
    m.summary["final_reward"] = last.undiscounted_reward;
    m.summary["final_cost"] = last.avg_cost;
    m.summary["final_lambda"] = tr.lagrange().lambda;
  }
  finish(m, config.out);
  return m;
}

RunManifest cmd_eval(const RunConfig& config, const std::optional<fs::path>& checkpoint,
                     const std::optional<fs::path>& demo_dir, bool force) {
  config.validate();
  auto m = start_manifest("eval", config);
  const auto policy = load_policy(config, checkpoint ? *checkpoint : config.out / files::kPolicyCheckpoint, force, m);
  ensure_dir(config.out);
  const int n = config.eval.rollouts;
  const auto ev = train::evaluate_policy(policy, config.sim, n, config.seed, config.optim.cycle);

  util::CsvTable table(columns(kEvalColumns));
  table.add_comment(fingerprint_comment(m.fingerprint));
  table.add_comment("variant=" + m.variant);
  table.add_comment("seed=" + std::to_string(config.seed));
  auto add_block = [&](const std::string& name, const std::vector<double>& r, const std::vector<double>& c) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      table.add_row({name, std::to_string(k), format_double(r[k]), format_double(c[k])});
    }
    const auto [rm, rs] = train::mean_std(r);
    const auto [cm, cs] = train::mean_std(c);
    table.add_row({name, "mean", format_double(rm), format_double(cm)});
    table.add_row({name, "std", format_double(rs), format_double(cs)});
    m.summary[name] = {{"reward_mean", rm}, {"reward_std", rs}, {"cost_mean", cm}, {"cost_std", cs}};
  };
  add_block("policy", ev.rewards, ev.costs);

  const auto dir = demo_dir_or_default(config, demo_dir);
  if (fs::exists(dir / "index.csv")) {
    const auto set = gait::load_demo_set(dir);
    if (set.bf) {
      std::vector<double> r, c;
      const double f_s = config.sim.control_rate;
      for (int k = 0; k < n; ++k) {
        auto rec = gait::simulate_demo(set.bf->params, config.sim,
                                       util::derive_seed(config.seed, kEvalStream, static_cast<std::uint64_t>(k)),
                                       config.ranges);
        const auto [rew, cost] = train::score_trajectory(std::move(rec.trajectory), f_s, config.optim.cycle,
                                                         train::fallback_cycle_length(f_s));
        r.push_back(rew);
        c.push_back(cost);
      }
      add_block("bf", r, c);
    }
  }
  table.save(config.out / files::kEval);
  m.add("eval", config.out / files::kEval);
  finish(m, config.out);
  return m;
}

sim::GaitPrimitive capture_policy_cycle(const train::Policy& policy, const RunConfig& config) {
  sim::LimbSimulator env(config.sim, config.seed);
  const double f_s = config.sim.control_rate;
  for (int attempt = 0; attempt < config.transfer.max_attempts; ++attempt) {
    auto r = train::collect_rollout(
        policy, env, util::derive_seed(config.seed, kCaptureStream, static_cast<std::uint64_t>(attempt)), nullptr);
    const auto& tr = r.trajectory.transitions;
    std::vector<cmdp::JointVector> angles;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      angles.push_back(t + 1 < tr.size() ? tr[t + 1].obs.joint_angles : r.trajectory.terminal_obs->joint_angles);
    }
    // The primitive is a cycle of joint commands, so its period comes from the
    // joint with the larger swing; lift can peak twice per stroke.
    std::vector<double> joint[2];
    for (const auto& a : angles) {
      joint[0].push_back(a[0]);
      joint[1].push_back(a[1]);
    }
    auto spread = [](const std::vector<double>& v) { return train::mean_std(v).second; };
    const auto& signal = spread(joint[0]) >= spread(joint[1]) ? joint[0] : joint[1];
    int H = 0;
    try {
      H = train::detect_cycle(signal, f_s, config.optim.cycle).H;
    } catch (const train::NoDominantFrequency&) {
      continue;
    }
    if (H < 2 || static_cast<std::size_t>(H) > angles.size()) continue;
    sim::GaitPrimitive gait;
    gait.control_rate = f_s;
    // commanded angles over the final full cycle
    gait.angles.assign(angles.end() - H, angles.end());
    return gait;
  }
  throw NumericalAbort("no stable cycle detected after " + std::to_string(config.transfer.max_attempts) +
                       " attempts");
}

RunManifest cmd_transfer(const RunConfig& config, const std::optional<fs::path>& checkpoint, bool force) {
  config.validate();
  auto m = start_manifest("transfer", config);
  const auto policy = load_policy(config, checkpoint ? *checkpoint : config.out / files::kPolicyCheckpoint, force, m);
  ensure_dir(config.out);
  const auto gait = capture_policy_cycle(policy, config);
  const auto gait_path = config.out / files::kGaitPrimitive;
  save_primitive(gait_path, gait, m.fingerprint);
  m.add("gait_primitive", gait_path);

  const int H = gait.cycle_length();
  util::CsvTable table(columns(kTransferColumns));
  table.add_comment(fingerprint_comment(m.fingerprint));
  for (const int offset : {H / 2, 0}) {
    const auto res = sim::transfer_rollout(gait, config.transfer.n_cycles, config.transfer.geometry, config.sim, offset);
    double mz = 0.0;
    for (const auto& w : res.wrenches) mz = std::max(mz, std::abs(w.M_Z()));
    table.add_row({std::to_string(offset), std::to_string(H), format_double(res.summary.F_x_mean),
                   format_double(res.summary.F_z_mean), format_double(res.summary.F_z_var), format_double(mz)});
    m.summary["offset_" + std::to_string(offset)] = {
        {"F_x_mean", res.summary.F_x_mean}, {"F_z_mean", res.summary.F_z_mean}, {"F_z_var", res.summary.F_z_var}};
  }
  table.save(config.out / files::kTransfer);
  m.add("transfer", config.out / files::kTransfer);
  m.summary["H"] = H;
  finish(m, config.out);
  return m;
}

namespace {

struct RunRecord {
  fs::path dir;
  std::string fingerprint;
  std::string variant;
  std::vector<double> reward, cost, lambda;  // per episode
  std::optional<double> eval_reward, eval_cost;
};

RunRecord load_run(const fs::path& dir) {
  const auto metrics_path = dir / files::kMetrics;
  if (!fs::exists(metrics_path)) throw IoError("no metrics.csv in run directory " + dir.string());
  const auto csv = util::load_csv(metrics_path);
  RunRecord rec;
  rec.dir = dir;
  rec.fingerprint = comment_value(csv, "fingerprint").value_or("none");
  rec.variant = comment_value(csv, "variant").value_or("unknown");
  if (comment_value(csv, "init") == "scratch") rec.variant += "_SCRATCH";
  const auto ir = csv.column("undiscounted_reward"), ic = csv.column("avg_cost"), il = csv.column("lambda");
  for (const auto& row : csv.rows) {
    rec.reward.push_back(util::parse_double(row[ir]));
    rec.cost.push_back(util::parse_double(row[ic]));
    rec.lambda.push_back(util::parse_double(row[il]));
  }
  if (fs::exists(dir / files::kEval)) {
    const auto ev = util::load_csv(dir / files::kEval);
    const auto ip = ev.column("policy"), ik = ev.column("rollout");
    const auto er = ev.column("undiscounted_reward"), ec = ev.column("avg_cost");
    for (const auto& row : ev.rows) {
      if (row[ip] == "policy" && row[ik] == "mean") {
        rec.eval_reward = util::parse_double(row[er]);
        rec.eval_cost = util::parse_double(row[ec]);
      }
    }
  }
  return rec;
}

std::string opt_text(const std::vector<double>& v, bool std_dev) {
  if (v.empty()) return "";
  const auto [mean, sd] = train::mean_std(v);
  return format_double(std_dev ? sd : mean);
}

}  // namespace

RunManifest cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out, bool force) {
  if (run_dirs.empty()) throw ConfigError("report needs at least one run directory");
  std::vector<RunRecord> runs;
  for (const auto& d : run_dirs) runs.push_back(load_run(d));

  RunManifest m;
  m.command = "report";
  m.started = utc_now();
  m.fingerprint = runs.front().fingerprint;
  for (const auto& r : runs) {
    if (r.fingerprint != m.fingerprint) {
      const std::string msg = "run " + r.dir.string() + " has fingerprint " + r.fingerprint + ", expected " +
                              m.fingerprint;
      if (!force) throw ConfigError(msg + " (use --force to aggregate anyway)");
      m.summary["warnings"].push_back(msg);
    }
  }
  ensure_dir(out);

  // variants in canonical order, unknown tags last
  std::vector<std::string> order;
  for (const auto v : train::all_variants()) order.emplace_back(train::variant_name(v));
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) {
    groups[r.variant].push_back(&r);
    if (std::find(order.begin(), order.end(), r.variant) == order.end()) order.push_back(r.variant);
  }

  util::CsvTable table(columns(kReportColumns));
  table.add_comment(fingerprint_comment(m.fingerprint));
  for (const auto& name : order) {
    const auto it = groups.find(name);
    if (it == groups.end()) continue;
    const auto& members = it->second;
    std::vector<double> er, ec, tr, tc;
    for (const auto* r : members) {
      if (r->eval_reward) {
        er.push_back(*r->eval_reward);
        ec.push_back(*r->eval_cost);
      }
      if (!r->reward.empty()) {
        tr.push_back(r->reward.back());
        tc.push_back(r->cost.back());
      }
    }
    table.add_row({name, std::to_string(members.size()), opt_text(er, false), opt_text(er, true), opt_text(ec, false),
                   opt_text(ec, true), opt_text(tr, false), opt_text(tr, true), opt_text(tc, false),
                   opt_text(tc, true)});

    std::size_t len = members.front()->reward.size();
    for (const auto* r : members) len = std::min(len, r->reward.size());
    util::CsvTable curve(columns(kCurveColumns));
    curve.add_comment(fingerprint_comment(m.fingerprint));
    curve.add_comment("variant=" + name);
    for (std::size_t e = 0; e < len; ++e) {
      std::vector<double> r, c, l;
      for (const auto* run : members) {
        r.push_back(run->reward[e]);
        c.push_back(run->cost[e]);
        l.push_back(run->lambda[e]);
      }
      const auto [rm, rs] = train::mean_std(r);
      const auto [cm, cs] = train::mean_std(c);
      curve.add_row({std::to_string(e), format_double(rm), format_double(rs), format_double(cm), format_double(cs),
                     format_double(train::mean_std(l).first)});
    }
    const auto curve_path = out / ("curve_" + name + ".csv");
    curve.save(curve_path);
    m.add("curve", curve_path);
  }
  table.save(out / files::kReportTable);
  m.add("table", out / files::kReportTable);
  m.summary["runs"] = runs.size();
  finish(m, out);
  return m;
}

}  // namespace paddle::harness
