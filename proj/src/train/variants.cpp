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

#include "paddle/train/variants.hpp"

#include <array>

namespace paddle::train {

namespace {

struct NamedVariant {
  AlgoVariant variant;
  std::string_view name;
};

constexpr std::array<NamedVariant, 7> kNames{{
    {AlgoVariant::kAcppoPid, "ACPPO_PID"},
    {AlgoVariant::kCppoPid, "CPPO_PID"},
    {AlgoVariant::kCppoPidH, "CPPO_PID_H"},
    {AlgoVariant::kPpoPenalty, "PPO_PENALTY"},
    {AlgoVariant::kPpoNoCost, "PPO_NO_COST"},
    {AlgoVariant::kAcppoNoCycle, "ACPPO_NO_CYCLE"},
    {AlgoVariant::kAcppoNoAsym, "ACPPO_NO_ASYM"},
}};

}  // namespace

VariantRules variant_rules(AlgoVariant variant, const ClipSchedule& sched) {
  VariantRules r;
  switch (variant) {
    case AlgoVariant::kAcppoPid:
      r.clip = ClipRule::kAsymmetric;
      r.alpha = sched.alpha;
      break;
    case AlgoVariant::kAcppoNoCycle:
      r.clip = ClipRule::kAsymmetric;
      r.alpha = 1.0;
      break;
    case AlgoVariant::kAcppoNoAsym:
      r.clip = ClipRule::kSymmetric;
      r.alpha = sched.alpha;
      break;
    case AlgoVariant::kCppoPid:
      r.clip = ClipRule::kSymmetric;
      r.alpha = 1.0;
      break;
    case AlgoVariant::kCppoPidH:
      r.clip = ClipRule::kFixedHigh;
      r.alpha = 1.0;
      break;
    case AlgoVariant::kPpoPenalty:
      r.clip = ClipRule::kSymmetric;
      r.alpha = 1.0;
      r.multiplier = MultiplierRule::kFrozen;
      r.reward_cost_penalty = 0.5;
      break;
    case AlgoVariant::kPpoNoCost:
      r.clip = ClipRule::kSymmetric;
      r.alpha = 1.0;
      r.multiplier = MultiplierRule::kZero;
      r.ignore_cost = true;
      break;
    default:
      throw std::invalid_argument("unknown variant");
  }
  return r;
}

std::string_view variant_name(AlgoVariant variant) {
  for (const auto& n : kNames) {
    if (n.variant == variant) return n.name;
  }
  throw std::invalid_argument("unknown variant");
}

AlgoVariant parse_variant(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.variant;
  }
  throw std::invalid_argument("unknown variant: " + std::string(name));
}

const std::vector<AlgoVariant>& all_variants() {
  static const std::vector<AlgoVariant> v = [] {
    std::vector<AlgoVariant> out;
    for (const auto& n : kNames) out.push_back(n.variant);
    return out;
  }();
  return v;
}

}  // namespace paddle::train
