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

#include <filesystem>
#include <vector>

#include "paddle/sim/limb.hpp"

namespace paddle::sim {

// Actuator placement relative to the centre of buoyancy. The robot's values
// are not published; these defaults are placeholders.
struct QuadGeometry {
  double h = 0.03;    // vertical eccentricity, m
  double L_x = 0.18;  // m
  double L_y = 0.10;  // m

  void validate() const;
};

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

// Force and moment contribution of one leg of a diagonal pair.
template <typename Scalar>
struct LegWrench {
  Vector3<Scalar> force = Vector3<Scalar>::Zero();
  Vector3<Scalar> torque = Vector3<Scalar>::Zero();
};

template <typename Scalar>
struct BodyWrench {
  Vector3<Scalar> force = Vector3<Scalar>::Zero();   // (f_X, f_Y, f_Z)
  Vector3<Scalar> moment = Vector3<Scalar>::Zero();  // (M_X, M_Y, M_Z)

  Scalar f_X() const { return force.x(); }
  Scalar f_Y() const { return force.y(); }
  Scalar f_Z() const { return force.z(); }
  Scalar M_X() const { return moment.x(); }
  Scalar M_Y() const { return moment.y(); }
  Scalar M_Z() const { return moment.z(); }
};

// Net body wrench when both legs of pair 1 produce (F1, tau1) and both legs
// of pair 2 produce (F2, tau2):
//   F = 2 (F1 + F2),  M_X = 2 (t1x + t2x) - h f_Y,
//   M_Y = 2 (t1y + t2y) + h f_X,  M_Z = 2 (t1z + t2z).
template <typename Scalar>
BodyWrench<Scalar> quad_superpose(const LegWrench<Scalar>& pair1, const LegWrench<Scalar>& pair2,
                                  Scalar h) {
  BodyWrench<Scalar> out;
  out.force = Scalar(2) * (pair1.force + pair2.force);
  const Vector3<Scalar> tau = Scalar(2) * (pair1.torque + pair2.torque);
  out.moment.x() = tau.x() - h * out.force.y();
  out.moment.y() = tau.y() + h * out.force.x();
  out.moment.z() = tau.z();
  return out;
}

inline BodyWrench<double> quad_superpose(const LegWrench<double>& pair1,
                                         const LegWrench<double>& pair2, const QuadGeometry& geom) {
  return quad_superpose<double>(pair1, pair2, geom.h);
}

// Planar single-limb reading mapped onto a leg wrench: F = (F_x, 0, F_z),
// tau = (0, M_y, 0).
inline LegWrench<double> leg_wrench_from_planar(const ForceVector& fxz_my) {
  LegWrench<double> w;
  w.force = {fxz_my[0], 0.0, fxz_my[1]};
  w.torque = {0.0, fxz_my[2], 0.0};
  return w;
}

// One recorded cycle of commanded joint angles.
struct GaitPrimitive {
  std::vector<JointVector> angles;
  double control_rate = 20.0;

  int cycle_length() const { return static_cast<int>(angles.size()); }
};

// Text format:
//   # gait primitive f_s=<Hz> H=<steps>
//   theta_H,theta_K
//   <one row per control step, radians>
void save_gait_primitive(const std::filesystem::path& path, const GaitPrimitive& gait);
GaitPrimitive load_gait_primitive(const std::filesystem::path& path);
std::string gait_primitive_to_text(const GaitPrimitive& gait);
GaitPrimitive gait_primitive_from_text(std::string_view text);

struct TransferSummary {
  double F_x_mean = 0.0;
  double F_z_mean = 0.0;
  double F_z_var = 0.0;
};

struct TransferResult {
  std::vector<BodyWrench<double>> wrenches;  // every step, transient included
  TransferSummary summary;                   // steady portion only
};

// Superposes a periodic single-limb wrench sequence (one entry per step of the
// cycle) for two diagonal pairs; pair 2 starts `offset` steps late and is idle
// until then. The first cycle is discarded from the summary statistics.
TransferResult superpose_pairs(const std::vector<ForceVector>& cycle_wrench, int n_cycles, int offset,
                               const QuadGeometry& geom);

// Replays the primitive kinematically on the limb model (noise-free, periodic
// joint velocities) and returns the per-step planar wrench for one cycle.
std::vector<ForceVector> replay_cycle_wrench(const GaitPrimitive& gait, const SimConfig& config);

// Both pairs run the same primitive, pair 2 delayed by `offset` steps
// (H/2 by default, i.e. offset < 0).
TransferResult transfer_rollout(const GaitPrimitive& gait, int n_cycles, const QuadGeometry& geom,
                                const SimConfig& config, int offset = -1);

}  // namespace paddle::sim
