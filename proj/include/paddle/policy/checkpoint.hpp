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
#include <optional>
#include <string>
#include <vector>

#include "paddle/nn/adam.hpp"
#include "paddle/policy/policy.hpp"

namespace paddle::policy {

// Binary layout (little-endian):
//   magic "PADLCKPT" | u32 version | u32 len + fingerprint | u32 len + spec JSON
//   | u32 n_arrays | n_arrays x (u32 len + name | u64 count | count x f32)
inline constexpr char kCheckpointMagic[8] = {'P', 'A', 'D', 'L', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<float> data;
};

struct Checkpoint {
  std::string fingerprint;
  PolicySpec spec;
  std::vector<NamedArray> arrays;
  // Set by load when a mismatch was overridden.
  std::vector<std::string> warnings;

  const NamedArray* find(const std::string& name) const;
  void put(std::string name, std::vector<float> data);
};

std::string checkpoint_to_bytes(const Checkpoint& ckpt);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws IoError on corruption or version mismatch. A fingerprint mismatch
// throws unless `force`, in which case a warning is recorded.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_fingerprint = std::nullopt,
                           bool force = false);

template <typename Scalar>
Checkpoint make_checkpoint(const ActorCritic<Scalar>& policy, std::string fingerprint) {
  Checkpoint ckpt;
  ckpt.fingerprint = std::move(fingerprint);
  ckpt.spec = policy.spec();
  for (const auto& b : policy.params().blocks()) {
    const auto seg = policy.params().values().segment(b.offset, b.size());
    std::vector<float> data(static_cast<std::size_t>(b.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i) data[static_cast<std::size_t>(i)] = static_cast<float>(seg[i]);
    ckpt.put("param/" + b.name, std::move(data));
  }
  return ckpt;
}

template <typename Scalar>
ActorCritic<Scalar> policy_from_checkpoint(const Checkpoint& ckpt) {
  ActorCritic<Scalar> policy(ckpt.spec, 0);
  for (const auto& b : policy.params().blocks()) {
    const auto* arr = ckpt.find("param/" + b.name);
    if (!arr || static_cast<Eigen::Index>(arr->data.size()) != b.size()) {
      throw std::invalid_argument("checkpoint lacks parameter block " + b.name);
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      policy.params().values()[b.offset + i] = static_cast<Scalar>(arr->data[static_cast<std::size_t>(i)]);
    }
  }
  return policy;
}

template <typename Scalar>
void put_adam_state(Checkpoint& ckpt, const nn::AdamState<Scalar>& state) {
  auto to_vec = [](const nn::Vector<Scalar>& v) {
    std::vector<float> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(v[i]);
    return out;
  };
  ckpt.put("adam/m", to_vec(state.m));
  ckpt.put("adam/v", to_vec(state.v));
  ckpt.put("adam/step", {static_cast<float>(state.step)});
}

template <typename Scalar>
std::optional<nn::AdamState<Scalar>> get_adam_state(const Checkpoint& ckpt) {
  const auto* m = ckpt.find("adam/m");
  const auto* v = ckpt.find("adam/v");
  const auto* step = ckpt.find("adam/step");
  if (!m || !v || !step || step->data.size() != 1 || m->data.size() != v->data.size()) return std::nullopt;
  nn::AdamState<Scalar> s;
  s.m = Eigen::Map<const Eigen::VectorXf>(m->data.data(), static_cast<Eigen::Index>(m->data.size()))
            .template cast<Scalar>();
  s.v = Eigen::Map<const Eigen::VectorXf>(v->data.data(), static_cast<Eigen::Index>(v->data.size()))
            .template cast<Scalar>();
  s.step = static_cast<long long>(step->data[0]);
  return s;
}

}  // namespace paddle::policy
