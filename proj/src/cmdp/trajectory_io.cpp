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

#include "paddle/cmdp/trajectory_io.hpp"

#include <cmath>
#include <limits>

#include "paddle/errors.hpp"
#include "paddle/util/csv.hpp"

namespace paddle::cmdp {

namespace {

std::vector<std::string> column_names() { return util::split(kTrajectoryColumns, ','); }

}  // namespace

std::string trajectory_to_text(const Trajectory& traj) {
  using util::format_double;
  util::CsvTable table(column_names());
  for (const auto& tr : traj.transitions) {
    const auto& o = tr.obs;
    table.add_row({std::to_string(tr.step_index), format_double(o.joint_angles[0]),
                   format_double(o.joint_angles[1]), format_double(o.joint_velocities[0]),
                   format_double(o.joint_velocities[1]), format_double(o.sensed_forces[0]),
                   format_double(o.sensed_forces[1]), format_double(o.sensed_forces[2]),
                   o.phase_clock ? format_double(*o.phase_clock) : std::string("nan"),
                   format_double(tr.action.joint_deltas[0]), format_double(tr.action.joint_deltas[1]),
                   format_double(tr.reward), format_double(tr.cost), format_double(tr.logp_behavior),
                   tr.done ? "1" : "0", format_double(tr.lift)});
  }
  return table.str();
}

Trajectory trajectory_from_text(std::string_view text) {
  const auto csv = util::parse_csv(text);
  if (csv.columns != column_names()) {
    throw IoError("trajectory header does not match the expected column order");
  }
  Trajectory traj;
  traj.transitions.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    Transition tr;
    tr.step_index = static_cast<int>(util::parse_int(row[0]));
    tr.obs.joint_angles = {util::parse_double(row[1]), util::parse_double(row[2])};
    tr.obs.joint_velocities = {util::parse_double(row[3]), util::parse_double(row[4])};
    tr.obs.sensed_forces = {util::parse_double(row[5]), util::parse_double(row[6]),
                            util::parse_double(row[7])};
    if (row[8] != "nan") tr.obs.phase_clock = util::parse_double(row[8]);
    tr.action.joint_deltas = {util::parse_double(row[9]), util::parse_double(row[10])};
    tr.reward = util::parse_double(row[11]);
    tr.cost = util::parse_double(row[12]);
    tr.logp_behavior = util::parse_double(row[13]);
    tr.done = util::parse_int(row[14]) != 0;
    tr.lift = util::parse_double(row[15]);
    traj.transitions.push_back(tr);
  }
  return traj;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  util::write_text_file(path, trajectory_to_text(traj));
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  return trajectory_from_text(util::read_text_file(path));
}

}  // namespace paddle::cmdp
