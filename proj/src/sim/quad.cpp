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

#include "paddle/sim/quad.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"

namespace paddle::sim {

void QuadGeometry::validate() const {
  if (!std::isfinite(h) || !std::isfinite(L_x) || !std::isfinite(L_y) || h < 0.0) {
    throw std::invalid_argument("quadruped geometry must be finite with h >= 0");
  }
}

namespace {

void check_cycle(int H) {
  if (H < 2 || H % 2 != 0) {
    throw std::invalid_argument("invalid gait primitive");
  }
}

}  // namespace

std::string gait_primitive_to_text(const GaitPrimitive& gait) {
  util::CsvTable table({"theta_H", "theta_K"});
  table.add_comment("gait primitive f_s=" + util::format_double(gait.control_rate) +
                    " H=" + std::to_string(gait.cycle_length()));
  for (const auto& a : gait.angles) {
    table.add_row({util::format_double(a[0]), util::format_double(a[1])});
  }
  return table.str();
}

GaitPrimitive gait_primitive_from_text(std::string_view text) {
  const auto csv = util::parse_csv(text);
  if (csv.columns.size() != 2 || csv.columns[0] != "theta_H" || csv.columns[1] != "theta_K") {
    throw IoError("gait primitive header must be theta_H,theta_K");
  }
  GaitPrimitive gait;
  int declared_h = -1;
  for (const auto& c : csv.comments) {
    std::istringstream ss(c);
    std::string tok;
    while (ss >> tok) {
      if (tok.rfind("f_s=", 0) == 0) gait.control_rate = util::parse_double(tok.substr(4));
      if (tok.rfind("H=", 0) == 0) declared_h = static_cast<int>(util::parse_int(tok.substr(2)));
    }
  }
  for (const auto& row : csv.rows) {
    gait.angles.emplace_back(util::parse_double(row[0]), util::parse_double(row[1]));
  }
  if (declared_h >= 0 && declared_h != gait.cycle_length()) {
    throw IoError("gait primitive row count does not match its declared H");
  }
  return gait;
}

void save_gait_primitive(const std::filesystem::path& path, const GaitPrimitive& gait) {
  util::write_text_file(path, gait_primitive_to_text(gait));
}

GaitPrimitive load_gait_primitive(const std::filesystem::path& path) {
  return gait_primitive_from_text(util::read_text_file(path));
}

TransferResult superpose_pairs(const std::vector<ForceVector>& cycle_wrench, int n_cycles, int offset,
                               const QuadGeometry& geom) {
  const int H = static_cast<int>(cycle_wrench.size());
  check_cycle(H);
  geom.validate();
  if (n_cycles < 2) {
    throw std::invalid_argument("transfer needs at least two cycles (the first is discarded)");
  }
  if (offset < 0 || offset >= H) {
    throw std::invalid_argument("pair offset must lie in [0, H)");
  }

  TransferResult res;
  const int total = n_cycles * H;
  res.wrenches.reserve(static_cast<std::size_t>(total));
  for (int t = 0; t < total; ++t) {
    const auto pair1 = leg_wrench_from_planar(cycle_wrench[static_cast<std::size_t>(t % H)]);
    LegWrench<double> pair2;
    if (t >= offset) {
      pair2 = leg_wrench_from_planar(cycle_wrench[static_cast<std::size_t>((t - offset) % H)]);
    }
    res.wrenches.push_back(quad_superpose(pair1, pair2, geom));
  }

  const int steady = total - H;
  double sx = 0.0, sz = 0.0;
  for (int t = H; t < total; ++t) {
    sx += res.wrenches[t].f_X();
    sz += res.wrenches[t].f_Z();
  }
  res.summary.F_x_mean = sx / steady;
  res.summary.F_z_mean = sz / steady;
  double var = 0.0;
  for (int t = H; t < total; ++t) {
    const double d = res.wrenches[t].f_Z() - res.summary.F_z_mean;
    var += d * d;
  }
  res.summary.F_z_var = var / steady;
  return res;
}

std::vector<ForceVector> replay_cycle_wrench(const GaitPrimitive& gait, const SimConfig& config) {
  const int H = gait.cycle_length();
  check_cycle(H);
  const double dt = 1.0 / gait.control_rate;
  std::vector<ForceVector> out;
  out.reserve(static_cast<std::size_t>(H));
  for (int t = 0; t < H; ++t) {
    const JointVector theta = clamp_to_swing(gait.angles[t], config);
    const JointVector prev = clamp_to_swing(gait.angles[(t + H - 1) % H], config);
    const JointVector omega = (theta - prev) / dt;
    out.push_back(plate_wrench(config.geometry, theta, omega, config.tow_speed));
  }
  return out;
}

TransferResult transfer_rollout(const GaitPrimitive& gait, int n_cycles, const QuadGeometry& geom,
                                const SimConfig& config, int offset) {
  const int H = gait.cycle_length();
  check_cycle(H);
  if (offset < 0) offset = H / 2;
  return superpose_pairs(replay_cycle_wrench(gait, config), n_cycles, offset, geom);
}

}  // namespace paddle::sim
