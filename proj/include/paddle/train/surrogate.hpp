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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "paddle/cmdp/types.hpp"
#include "paddle/train/variants.hpp"

namespace paddle::train {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Log-ratios are clamped to +-kLogRatioClamp before exponentiation.
inline constexpr double kLogRatioClamp = 20.0;

// Fractions of the steps in a batch where a clip bound was binding.
struct ClipStats {
  double upper = 0.0;     // A > 0 and rho above the upper bound
  double lower = 0.0;     // A < 0 and rho below the lower bound
  double widened = 0.0;   // steps that used an enlarged upper bound
};

// Loss value and its derivative with respect to each step's log-ratio
// (equivalently the current log-density).
template <typename Scalar>
struct SurrogateResult {
  Scalar loss = Scalar(0);
  Vec<Scalar> grad;
  ClipStats stats;
  bool used = true;  // false when the term was not applicable to the batch
};

template <typename Scalar>
inline Scalar clamp_log_ratio(Scalar x) {
  return std::clamp(x, Scalar(-kLogRatioClamp), Scalar(kLogRatioClamp));
}

// L = -mean_t min(rho_t A_t, clip(rho_t, 1 - eps_lower, 1 + eps_upper_t) A_t)
template <typename Scalar>
SurrogateResult<Scalar> step_surrogate(const Vec<Scalar>& log_ratio, const Vec<Scalar>& A,
                                       const Vec<Scalar>& eps_upper, Scalar eps_lower) {
  const Eigen::Index n = log_ratio.size();
  if (A.size() != n || eps_upper.size() != n) throw std::invalid_argument("surrogate inputs differ in length");
  if (n == 0) throw std::invalid_argument("empty batch");
  SurrogateResult<Scalar> out;
  out.grad = Vec<Scalar>::Zero(n);
  const Scalar inv_n = Scalar(1) / Scalar(n);
  Scalar total(0);
  std::size_t upper = 0, lower = 0, widened = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const Scalar lr = clamp_log_ratio(log_ratio[t]);
    const Scalar rho = std::exp(lr);
    const Scalar lo = Scalar(1) - eps_lower;
    const Scalar hi = Scalar(1) + eps_upper[t];
    const Scalar unclipped = rho * A[t];
    const Scalar clipped = std::clamp(rho, lo, hi) * A[t];
    if (eps_upper[t] > eps_lower) ++widened;
    if (unclipped <= clipped) {
      total += unclipped;
      if (std::abs(log_ratio[t]) < Scalar(kLogRatioClamp)) out.grad[t] = -inv_n * unclipped;
    } else {
      total += clipped;
      if (A[t] > Scalar(0)) ++upper;
      if (A[t] < Scalar(0)) ++lower;
    }
  }
  out.loss = -total * inv_n;
  out.stats.upper = static_cast<double>(upper) / static_cast<double>(n);
  out.stats.lower = static_cast<double>(lower) / static_cast<double>(n);
  out.stats.widened = static_cast<double>(widened) / static_cast<double>(n);
  return out;
}

// How the per-step log-ratio is clipped inside a cycle.
enum class CycleLogClip {
  // min(iota, clip(iota, -eps_p, eps_p) * sign(A)) with iota = sign(A) log rho
  kLiteral,
  // sign(A) * min(sign(A) log rho, sign(A) clip(log rho, -eps_p, eps_p))
  kSignSymmetric,
};

template <typename Scalar>
struct CycleAggregate {
  Scalar rho_tilde = Scalar(1);
  Vec<Scalar> dlog_rho_tilde;  // d log(rho_tilde) / d log_ratio_t
};

template <typename Scalar>
inline Scalar sign_of(Scalar a) {
  return a < Scalar(0) ? Scalar(-1) : Scalar(1);
}

// Clipped geometric mean of the importance ratios of one cycle.
template <typename Scalar>
CycleAggregate<Scalar> cycle_aggregate(std::span<const Scalar> log_ratio, std::span<const Scalar> A, Scalar eps_p,
                                       CycleLogClip mode = CycleLogClip::kLiteral) {
  if (log_ratio.empty()) throw std::invalid_argument("empty cycle segment");
  if (log_ratio.size() != A.size()) throw std::invalid_argument("cycle inputs differ in length");
  const auto n = static_cast<Eigen::Index>(log_ratio.size());
  const Scalar inv_h = Scalar(1) / Scalar(n);
  CycleAggregate<Scalar> out;
  out.dlog_rho_tilde = Vec<Scalar>::Zero(n);
  Scalar sum(0);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Scalar raw = log_ratio[static_cast<std::size_t>(t)];
    const Scalar lr = clamp_log_ratio(raw);
    const Scalar inside_ratio_clamp = std::abs(raw) < Scalar(kLogRatioClamp) ? Scalar(1) : Scalar(0);
    const Scalar s = sign_of(A[static_cast<std::size_t>(t)]);
    Scalar term, dterm;
    if (mode == CycleLogClip::kLiteral) {
      const Scalar iota = lr * s;
      const Scalar clipped = std::clamp(iota, -eps_p, eps_p) * s;
      if (iota <= clipped) {
        term = iota;
        dterm = s;
      } else {
        term = clipped;
        dterm = std::abs(iota) < eps_p ? Scalar(1) : Scalar(0);
      }
    } else {
      const Scalar c = std::clamp(lr, -eps_p, eps_p);
      if (s * lr <= s * c) {
        term = lr;
        dterm = Scalar(1);
      } else {
        term = c;
        dterm = std::abs(lr) < eps_p ? Scalar(1) : Scalar(0);
      }
    }
    sum += term;
    out.dlog_rho_tilde[t] = dterm * inv_h * inside_ratio_clamp;
  }
  out.rho_tilde = std::exp(sum * inv_h);
  return out;
}

// L = -(1/M) sum_p sum_{t in p} rho_tilde_p A_t over the M in-cycle steps.
// Returns used = false and a zero loss when no complete cycle exists.
template <typename Scalar>
SurrogateResult<Scalar> cycle_surrogate(const Vec<Scalar>& log_ratio, const Vec<Scalar>& A,
                                        const std::vector<cmdp::CycleSegment>& segments, Scalar eps_p,
                                        CycleLogClip mode = CycleLogClip::kLiteral) {
  const Eigen::Index n = log_ratio.size();
  if (A.size() != n) throw std::invalid_argument("surrogate inputs differ in length");
  SurrogateResult<Scalar> out;
  out.grad = Vec<Scalar>::Zero(n);
  std::size_t m = 0;
  for (const auto& seg : segments) {
    if (seg.length == 0 || seg.end() > static_cast<std::size_t>(n)) throw std::invalid_argument("invalid cycle segment");
    m += seg.length;
  }
  if (m == 0) {
    out.used = false;
    return out;
  }
  const Scalar inv_m = Scalar(1) / Scalar(m);
  Scalar total(0);
  for (const auto& seg : segments) {
    const auto b = static_cast<Eigen::Index>(seg.begin);
    const auto h = static_cast<Eigen::Index>(seg.length);
    const auto agg = cycle_aggregate<Scalar>(std::span<const Scalar>(log_ratio.data() + b, seg.length),
                                             std::span<const Scalar>(A.data() + b, seg.length), eps_p, mode);
    const Scalar a_sum = A.segment(b, h).sum();
    total += agg.rho_tilde * a_sum;
    out.grad.segment(b, h) = (-inv_m * a_sum * agg.rho_tilde) * agg.dlog_rho_tilde;
  }
  out.loss = -total * inv_m;
  return out;
}

template <typename Scalar>
Scalar blend_actor_loss(Scalar alpha, Scalar step_loss, Scalar cycle_loss) {
  return alpha * step_loss + (Scalar(1) - alpha) * cycle_loss;
}

// Everything the actor objective needs for one minibatch.
template <typename Scalar>
struct ActorBatch {
  Vec<Scalar> log_ratio;  // log pi_theta - log pi_old
  Vec<Scalar> A_lambda;
  Eigen::VectorXd A_r;    // raw GAE, for the asymmetric-clip gate
  Eigen::VectorXd A_c;
  std::vector<cmdp::CycleSegment> segments;  // indices local to the batch
  int episode = 0;
};

template <typename Scalar>
struct ActorLossResult {
  Scalar loss = Scalar(0);
  Scalar step = Scalar(0);
  Scalar cycle = Scalar(0);
  bool cycle_used = false;
  Vec<Scalar> grad;  // d loss / d log_ratio
  ClipStats stats;
};

// Per-step upper clip offsets under a variant's clip rule.
template <typename Scalar>
Vec<Scalar> upper_clip_offsets(const ActorBatch<Scalar>& batch, const ClipSchedule& sched, ClipRule rule) {
  const Eigen::Index n = batch.log_ratio.size();
  Vec<Scalar> eps(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    switch (rule) {
      case ClipRule::kAsymmetric:
        eps[t] = Scalar(asym_clip_bound(batch.A_r[t], batch.A_c[t], batch.episode, sched));
        break;
      case ClipRule::kFixedHigh:
        eps[t] = Scalar(sched.epsilon_hi);
        break;
      default:
        eps[t] = Scalar(sched.epsilon);
    }
  }
  return eps;
}

// alpha L_step + (1 - alpha) L_cyc under the variant's rules; alpha = 1, or a
// batch without complete cycles, reduces to the step surrogate alone.
template <typename Scalar>
ActorLossResult<Scalar> actor_loss(const ActorBatch<Scalar>& batch, const ClipSchedule& sched,
                                   const VariantRules& rules, CycleLogClip mode = CycleLogClip::kLiteral) {
  const Eigen::Index n = batch.log_ratio.size();
  if (batch.A_lambda.size() != n) throw std::invalid_argument("actor batch inputs differ in length");
  if (rules.clip == ClipRule::kAsymmetric && (batch.A_r.size() != n || batch.A_c.size() != n)) {
    throw std::invalid_argument("asymmetric clipping needs raw advantages for every step");
  }
  const Vec<Scalar> eps_upper = upper_clip_offsets(batch, sched, rules.clip);
  auto step = step_surrogate<Scalar>(batch.log_ratio, batch.A_lambda, eps_upper, Scalar(sched.epsilon));
  ActorLossResult<Scalar> out;
  out.step = step.loss;
  out.stats = step.stats;
  if (rules.alpha >= 1.0) {
    out.loss = step.loss;
    out.grad = std::move(step.grad);
    return out;
  }
  auto cyc = cycle_surrogate<Scalar>(batch.log_ratio, batch.A_lambda, batch.segments, Scalar(sched.epsilon_p), mode);
  if (!cyc.used) {
    out.loss = step.loss;
    out.grad = std::move(step.grad);
    return out;
  }
  const Scalar alpha = Scalar(rules.alpha);
  out.cycle = cyc.loss;
  out.cycle_used = true;
  out.loss = blend_actor_loss(alpha, step.loss, cyc.loss);
  out.grad = alpha * step.grad + (Scalar(1) - alpha) * cyc.grad;
  return out;
}

}  // namespace paddle::train
