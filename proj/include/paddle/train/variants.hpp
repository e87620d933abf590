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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paddle::train {

struct ClipSchedule {
  double epsilon = 0.2;
  double epsilon_hi = 0.28;
  double epsilon_p = 0.4;
  int ep_warm = 10;
  double alpha = 0.2;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon <= epsilon_hi) || !(epsilon_p > 0.0) || !(alpha > 0.0 && alpha < 1.0) ||
        ep_warm < 0) {
      throw std::invalid_argument("invalid clip schedule");
    }
  }
};

// Upper clip offset for one step: epsilon_hi when the raw reward advantage is
// positive, the raw cost advantage non-positive and warm-up is over;
// epsilon otherwise.
inline double asym_clip_bound(double A_r, double A_c, int episode, const ClipSchedule& sched) {
  return (A_r > 0.0 && A_c <= 0.0 && episode >= sched.ep_warm) ? sched.epsilon_hi : sched.epsilon;
}

enum class AlgoVariant {
  kAcppoPid,
  kCppoPid,
  kCppoPidH,
  kPpoPenalty,
  kPpoNoCost,
  kAcppoNoCycle,
  kAcppoNoAsym,
};

enum class ClipRule { kAsymmetric, kSymmetric, kFixedHigh };
enum class MultiplierRule { kPid, kFrozen, kZero };

// (clip rule, loss mix, multiplier rule) for each variant, plus how the cost
// enters the reward.
struct VariantRules {
  ClipRule clip = ClipRule::kAsymmetric;
  double alpha = 1.0;  // weight of the step-wise surrogate
  MultiplierRule multiplier = MultiplierRule::kPid;
  double reward_cost_penalty = 0.0;  // r <- r - penalty * c
  bool ignore_cost = false;          // cost channel zeroed for optimisation
};

VariantRules variant_rules(AlgoVariant variant, const ClipSchedule& sched);

std::string_view variant_name(AlgoVariant variant);
AlgoVariant parse_variant(std::string_view name);
const std::vector<AlgoVariant>& all_variants();

}  // namespace paddle::train
