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

#include "paddle/policy/policy.hpp"

#include "paddle/util/hash.hpp"

namespace paddle::policy {

void PolicySpec::validate() const {
  if (window < 1 || act_dim < 1) throw std::invalid_argument("policy window and action size must be positive");
  if (encoder == EncoderKind::kAttention &&
      (embed_dim < 1 || heads < 1 || embed_dim % heads != 0 || blocks < 0 || ff_dim < 1)) {
    throw std::invalid_argument("invalid attention encoder dimensions");
  }
  for (int h : mlp_hidden) {
    if (h < 1) throw std::invalid_argument("hidden sizes must be positive");
  }
  for (int h : head_hidden) {
    if (h < 1) throw std::invalid_argument("hidden sizes must be positive");
  }
  if (!(log_std_min < log_std_max)) throw std::invalid_argument("log-std bounds must be ordered");
  if (!(action_scale > 0.0)) throw std::invalid_argument("action scale must be positive");
}

nlohmann::json PolicySpec::to_json() const {
  nlohmann::json j;
  j["window"] = window;
  j["encoder"] = encoder == EncoderKind::kMlp ? "mlp" : "attention";
  j["embed_dim"] = embed_dim;
  j["heads"] = heads;
  j["blocks"] = blocks;
  j["ff_dim"] = ff_dim;
  j["mlp_hidden"] = mlp_hidden;
  j["head_hidden"] = head_hidden;
  j["shared_encoder"] = shared_encoder;
  j["act_dim"] = act_dim;
  j["action_scale"] = action_scale;
  j["log_std_min"] = log_std_min;
  j["log_std_max"] = log_std_max;
  j["init_log_std"] = init_log_std;
  j["features"] = {{"neutral", {features.neutral[0], features.neutral[1]}},
                   {"angle_scale", features.angle_scale},
                   {"velocity_scale", features.velocity_scale},
                   {"force_scale", features.force_scale},
                   {"moment_scale", features.moment_scale},
                   {"phase_clock", features.phase_clock}};
  return j;
}

PolicySpec PolicySpec::from_json(const nlohmann::json& j) {
  PolicySpec s;
  s.window = j.at("window").get<int>();
  const auto enc = j.at("encoder").get<std::string>();
  if (enc == "mlp") {
    s.encoder = EncoderKind::kMlp;
  } else if (enc == "attention") {
    s.encoder = EncoderKind::kAttention;
  } else {
    throw std::invalid_argument("unknown encoder kind: " + enc);
  }
  s.embed_dim = j.at("embed_dim").get<int>();
  s.heads = j.at("heads").get<int>();
  s.blocks = j.at("blocks").get<int>();
  s.ff_dim = j.at("ff_dim").get<int>();
  s.mlp_hidden = j.at("mlp_hidden").get<std::vector<int>>();
  s.head_hidden = j.at("head_hidden").get<std::vector<int>>();
  s.shared_encoder = j.at("shared_encoder").get<bool>();
  s.act_dim = j.at("act_dim").get<int>();
  s.action_scale = j.at("action_scale").get<double>();
  s.log_std_min = j.at("log_std_min").get<double>();
  s.log_std_max = j.at("log_std_max").get<double>();
  s.init_log_std = j.at("init_log_std").get<double>();
  const auto& f = j.at("features");
  const auto neutral = f.at("neutral").get<std::vector<double>>();
  if (neutral.size() != 2) throw std::invalid_argument("feature neutral must have two entries");
  s.features.neutral = {neutral[0], neutral[1]};
  s.features.angle_scale = f.at("angle_scale").get<double>();
  s.features.velocity_scale = f.at("velocity_scale").get<double>();
  s.features.force_scale = f.at("force_scale").get<double>();
  s.features.moment_scale = f.at("moment_scale").get<double>();
  s.features.phase_clock = f.at("phase_clock").get<bool>();
  s.validate();
  return s;
}

std::string PolicySpec::fingerprint() const { return util::sha1_hex(to_json().dump()).substr(0, 16); }

}  // namespace paddle::policy
