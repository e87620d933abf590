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

#include "paddle/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <functional>
#include <sstream>

#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"
#include "paddle/util/hash.hpp"

namespace paddle::harness {

namespace {

std::string to_text(double v) { return util::format_double(v); }
std::string to_text(int v) { return std::to_string(v); }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::string& v) { return v; }
std::string to_text(const std::filesystem::path& v) { return v.string(); }
std::string to_text(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}
std::string to_text(const std::optional<double>& v) { return v ? util::format_double(*v) : "none"; }
std::string to_text(policy::EncoderKind v) { return v == policy::EncoderKind::kMlp ? "mlp" : "attention"; }
std::string to_text(train::AlgoVariant v) { return std::string(train::variant_name(v)); }
std::string to_text(train::CycleLogClip v) {
  return v == train::CycleLogClip::kLiteral ? "literal" : "sign_symmetric";
}
std::string to_text(train::CostEstimator v) {
  return v == train::CostEstimator::kAverage ? "average" : "discounted";
}

void from_text(const std::string& s, double& v) { v = util::parse_double(s); }
void from_text(const std::string& s, int& v) { v = static_cast<int>(util::parse_int(s)); }
void from_text(const std::string& s, std::uint64_t& v) {
  const long long x = util::parse_int(s);
  if (x < 0) throw std::invalid_argument("negative seed");
  v = static_cast<std::uint64_t>(x);
}
void from_text(const std::string& s, bool& v) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    v = true;
  } else if (s == "false" || s == "0" || s == "no" || s == "off") {
    v = false;
  } else {
    throw std::invalid_argument("expected a boolean");
  }
}
void from_text(const std::string& s, std::string& v) { v = s; }
void from_text(const std::string& s, std::filesystem::path& v) { v = s; }
void from_text(const std::string& s, std::vector<int>& v) {
  v.clear();
  if (s.empty()) return;
  for (const auto& part : util::split(s, ',')) v.push_back(static_cast<int>(util::parse_int(part)));
}
void from_text(const std::string& s, std::optional<double>& v) {
  if (s == "none" || s.empty()) {
    v.reset();
  } else {
    v = util::parse_double(s);
  }
}
void from_text(const std::string& s, policy::EncoderKind& v) {
  if (s == "mlp") {
    v = policy::EncoderKind::kMlp;
  } else if (s == "attention") {
    v = policy::EncoderKind::kAttention;
  } else {
    throw std::invalid_argument("encoder must be attention or mlp");
  }
}
void from_text(const std::string& s, train::AlgoVariant& v) { v = train::parse_variant(s); }
void from_text(const std::string& s, train::CycleLogClip& v) {
  if (s == "literal") {
    v = train::CycleLogClip::kLiteral;
  } else if (s == "sign_symmetric") {
    v = train::CycleLogClip::kSignSymmetric;
  } else {
    throw std::invalid_argument("cycle_clip must be literal or sign_symmetric");
  }
}
void from_text(const std::string& s, train::CostEstimator& v) {
  if (s == "average") {
    v = train::CostEstimator::kAverage;
  } else if (s == "discounted") {
    v = train::CostEstimator::kDiscounted;
  } else {
    throw std::invalid_argument("cost_estimator must be average or discounted");
  }
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  bool fingerprinted = true;
};

template <typename Access>
Field field(std::string key, Access access, bool fingerprinted = true) {
  return Field{std::move(key), [access](const RunConfig& c) { return to_text(access(c)); },
               [access](RunConfig& c, const std::string& s) { from_text(s, access(c)); }, fingerprinted};
}

#define PADDLE_FIELD(key, member) field(key, [](auto& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f{
        field("run.seed", [](auto& c) -> auto& { return c.seed; }, false),
        field("run.variant", [](auto& c) -> auto& { return c.variant; }, false),
        field("run.out", [](auto& c) -> auto& { return c.out; }, false),
        PADDLE_FIELD("sim.tow_speed", sim.tow_speed),
        PADDLE_FIELD("sim.control_rate", sim.control_rate),
        PADDLE_FIELD("sim.episode_steps", sim.episode_steps),
        PADDLE_FIELD("sim.reward_scale", sim.reward_scale),
        PADDLE_FIELD("sim.phase_clock", sim.phase_clock),
        PADDLE_FIELD("sim.clock_frequency", sim.clock_frequency),
        PADDLE_FIELD("geometry.thigh_length", sim.geometry.thigh_length),
        PADDLE_FIELD("geometry.shank_length", sim.geometry.shank_length),
        PADDLE_FIELD("geometry.web_area", sim.geometry.web_area),
        PADDLE_FIELD("geometry.drag_coefficient", sim.geometry.web_drag_coefficient),
        PADDLE_FIELD("geometry.water_density", sim.geometry.water_density),
        PADDLE_FIELD("geometry.neutral_H", sim.geometry.neutral_angles[0]),
        PADDLE_FIELD("geometry.neutral_K", sim.geometry.neutral_angles[1]),
        PADDLE_FIELD("geometry.recovery_drag_ratio", sim.geometry.recovery_drag_ratio),
        PADDLE_FIELD("geometry.blade_elements", sim.geometry.blade_elements),
        PADDLE_FIELD("limits.swing", sim.limits.swing_limit),
        PADDLE_FIELD("limits.delta", sim.limits.delta_limit),
        PADDLE_FIELD("noise.force_sigma", sim.noise.force_sigma),
        PADDLE_FIELD("noise.moment_sigma", sim.noise.moment_sigma),
        PADDLE_FIELD("noise.force_process", sim.noise.force_process_noise),
        PADDLE_FIELD("noise.force_measurement", sim.noise.force_measurement_noise),
        PADDLE_FIELD("noise.moment_process", sim.noise.moment_process_noise),
        PADDLE_FIELD("noise.moment_measurement", sim.noise.moment_measurement_noise),
        PADDLE_FIELD("ranges.A_H_min", ranges.bounds[0].lo),
        PADDLE_FIELD("ranges.A_H_max", ranges.bounds[0].hi),
        PADDLE_FIELD("ranges.A_K_min", ranges.bounds[1].lo),
        PADDLE_FIELD("ranges.A_K_max", ranges.bounds[1].hi),
        PADDLE_FIELD("ranges.f_min", ranges.bounds[2].lo),
        PADDLE_FIELD("ranges.f_max", ranges.bounds[2].hi),
        PADDLE_FIELD("ranges.phi_min", ranges.bounds[3].lo),
        PADDLE_FIELD("ranges.phi_max", ranges.bounds[3].hi),
        PADDLE_FIELD("ranges.theta_H0_min", ranges.bounds[4].lo),
        PADDLE_FIELD("ranges.theta_H0_max", ranges.bounds[4].hi),
        PADDLE_FIELD("ranges.theta_K0_min", ranges.bounds[5].lo),
        PADDLE_FIELD("ranges.theta_K0_max", ranges.bounds[5].hi),
        PADDLE_FIELD("search.pool_size", search.pool_size),
        PADDLE_FIELD("search.top_thrust_fraction", search.top_thrust_fraction),
        PADDLE_FIELD("search.lift_percentile", search.lift_percentile),
        PADDLE_FIELD("policy.encoder", policy.encoder),
        PADDLE_FIELD("policy.window", policy.window),
        PADDLE_FIELD("policy.embed_dim", policy.embed_dim),
        PADDLE_FIELD("policy.heads", policy.heads),
        PADDLE_FIELD("policy.blocks", policy.blocks),
        PADDLE_FIELD("policy.ff_dim", policy.ff_dim),
        PADDLE_FIELD("policy.mlp_hidden", policy.mlp_hidden),
        PADDLE_FIELD("policy.head_hidden", policy.head_hidden),
        PADDLE_FIELD("policy.shared_encoder", policy.shared_encoder),
        PADDLE_FIELD("policy.action_scale", policy.action_scale),
        PADDLE_FIELD("policy.log_std_min", policy.log_std_min),
        PADDLE_FIELD("policy.log_std_max", policy.log_std_max),
        PADDLE_FIELD("policy.init_log_std", policy.init_log_std),
        PADDLE_FIELD("pretrain.epochs", pretrain.epochs),
        PADDLE_FIELD("pretrain.minibatch", pretrain.minibatch),
        PADDLE_FIELD("pretrain.learning_rate", pretrain.learning_rate),
        PADDLE_FIELD("pretrain.rmse_threshold", pretrain.rmse_threshold),
        PADDLE_FIELD("clip.epsilon", clip.epsilon),
        PADDLE_FIELD("clip.epsilon_hi", clip.epsilon_hi),
        PADDLE_FIELD("clip.epsilon_p", clip.epsilon_p),
        PADDLE_FIELD("clip.ep_warm", clip.ep_warm),
        PADDLE_FIELD("clip.alpha", clip.alpha),
        PADDLE_FIELD("clip.cycle_clip", optim.cycle_clip),
        PADDLE_FIELD("lagrange.lambda_init", lagrange.lambda),
        PADDLE_FIELD("lagrange.K_P", lagrange.K_P),
        PADDLE_FIELD("lagrange.K_I", lagrange.K_I),
        PADDLE_FIELD("lagrange.K_D", lagrange.K_D),
        PADDLE_FIELD("lagrange.integral_max", lagrange.integral_max),
        PADDLE_FIELD("lagrange.gains_relative", gains_relative),
        PADDLE_FIELD("lagrange.cost_estimator", optim.cost_estimator),
        PADDLE_FIELD("optim.gamma", optim.advantage.gamma),
        PADDLE_FIELD("optim.lambda_gae", optim.advantage.lambda_gae),
        PADDLE_FIELD("optim.advantage_clamp", optim.advantage.clamp),
        PADDLE_FIELD("optim.learning_rate", optim.adam.learning_rate),
        PADDLE_FIELD("optim.max_grad_norm", optim.adam.max_grad_norm),
        PADDLE_FIELD("optim.epochs", optim.epochs),
        PADDLE_FIELD("optim.minibatch", optim.minibatch),
        PADDLE_FIELD("optim.value_coef", optim.coefficients.value),
        PADDLE_FIELD("optim.entropy_coef", optim.coefficients.entropy),
        PADDLE_FIELD("cycle.f_min", optim.cycle.f_min),
        PADDLE_FIELD("cycle.f_max", optim.cycle.f_max),
        PADDLE_FIELD("cycle.detrend_order", optim.cycle.detrend_order),
        PADDLE_FIELD("cycle.min_duration", optim.cycle.min_duration),
        field("train.episodes", [](auto& c) -> auto& { return c.episodes; }, false),
        field("train.from_scratch", [](auto& c) -> auto& { return c.from_scratch; }, false),
        field("eval.rollouts", [](auto& c) -> auto& { return c.eval.rollouts; }, false),
        PADDLE_FIELD("transfer.h", transfer.geometry.h),
        PADDLE_FIELD("transfer.L_x", transfer.geometry.L_x),
        PADDLE_FIELD("transfer.L_y", transfer.geometry.L_y),
        PADDLE_FIELD("transfer.n_cycles", transfer.n_cycles),
        PADDLE_FIELD("transfer.max_attempts", transfer.max_attempts),
    };
    // d is special: only present once set
    f.push_back(Field{"lagrange.cost_limit",
                      [](const RunConfig& c) { return c.cost_limit_set ? to_text(c.lagrange.cost_limit) : ""; },
                      [](RunConfig& c, const std::string& s) {
                        from_text(s, c.lagrange.cost_limit);
                        c.cost_limit_set = true;
                      },
                      true});
    return f;
  }();
  return all;
}

#undef PADDLE_FIELD

}  // namespace

void RunConfig::validate() const {
  try {
    sim.validate();
    ranges.validate();
    policy.validate();
    clip.validate();
    lagrange.validate();
    transfer.geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (search.pool_size < 1) throw ConfigError("search.pool_size must be positive");
  if (!(search.top_thrust_fraction > 0.0 && search.top_thrust_fraction <= 1.0)) {
    throw ConfigError("search.top_thrust_fraction must lie in (0, 1]");
  }
  if (!(search.lift_percentile > 0.0 && search.lift_percentile <= 100.0)) {
    throw ConfigError("search.lift_percentile must lie in (0, 100]");
  }
  if (pretrain.epochs < 0 || pretrain.minibatch < 1) throw ConfigError("invalid pretrain schedule");
  if (optim.epochs < 0 || optim.minibatch < 1) throw ConfigError("invalid optimisation schedule");
  if (!(optim.advantage.gamma > 0.0 && optim.advantage.gamma <= 1.0)) throw ConfigError("optim.gamma must lie in (0, 1]");
  if (episodes < 0) throw ConfigError("train.episodes must be non-negative");
  if (eval.rollouts < 1) throw ConfigError("eval.rollouts must be positive");
  if (transfer.n_cycles < 2 || transfer.max_attempts < 1) throw ConfigError("invalid transfer settings");
  if (policy.features.phase_clock != sim.phase_clock) throw ConfigError("policy and simulator disagree on the phase clock");
}

train::LagrangeState RunConfig::effective_lagrange() const {
  train::LagrangeState s = lagrange;
  if (gains_relative) {
    const double d = lagrange.cost_limit;
    s.K_P /= d;
    s.K_I /= d;
    s.K_D /= d;
    if (s.integral_max) *s.integral_max *= d;
  }
  return s;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) {
    if (f.fingerprinted) j[f.key] = f.get(*this);
  }
  return j;
}

std::string RunConfig::fingerprint() const { return util::sha1_hex(to_json().dump()).substr(0, 16); }

Settings parse_settings(const std::string& ini_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  Settings out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key outside a section: " + section);
    for (const auto& [key, value] : body) out[section + "." + key] = value.get_value<std::string>();
  }
  return out;
}

Settings read_settings(const std::filesystem::path& path) {
  std::string text;
  try {
    text = util::read_text_file(path);
  } catch (const IoError&) {
    throw IoError("cannot read config file " + path.string());
  }
  return parse_settings(text);
}

RunConfig config_from_settings(const Settings& settings) {
  RunConfig cfg;
  for (const auto& [key, value] : settings) {
    const Field* match = nullptr;
    for (const auto& f : fields()) {
      if (f.key == key) match = &f;
    }
    if (!match) throw ConfigError("unknown config key " + key);
    try {
      match->set(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError("bad value for " + key + ": " + e.what());
    }
  }
  cfg.policy.features.neutral = cfg.sim.geometry.neutral_angles;
  cfg.policy.features.phase_clock = cfg.sim.phase_clock;
  cfg.pretrain.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

std::string config_to_ini(const RunConfig& config) {
  // sections in order of first appearance
  std::vector<std::pair<std::string, std::string>> sections;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string sec = f.key.substr(0, dot);
    const std::string value = f.get(config);
    if (f.key == "lagrange.cost_limit" && value.empty()) continue;
    auto it = std::find_if(sections.begin(), sections.end(), [&](const auto& s) { return s.first == sec; });
    if (it == sections.end()) it = sections.insert(sections.end(), {sec, ""});
    it->second += f.key.substr(dot + 1) + " = " + value + "\n";
  }
  std::string out;
  for (const auto& [name, body] : sections) out += (out.empty() ? "[" : "\n[") + name + "]\n" + body;
  return out;
}

}  // namespace paddle::harness
