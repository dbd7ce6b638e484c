// Copyright 2026 The drivelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "drivelab/planners.hpp"

#include "drivelab/error.hpp"
#include "drivelab/metrics.hpp"

#include <array>
#include <cmath>
#include <string>

namespace drivelab
{

namespace
{

constexpr std::array<std::string_view, 3> kPlannerNames = {
  "replay", "constant_velocity", "lane_follow"};

const AgentState & anchor_state(const Scene & scene, std::size_t frame)
{
  if (frame >= scene.frame_count()) {
    fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(frame) + " out of range");
  }
  const auto & s = scene.ego.states[frame];
  if (!s.valid) {
    fail(ErrorCode::kInvalidArgument, "ego invalid at frame " + std::to_string(frame));
  }
  return s;
}

// Point at arc length s, extended linearly beyond both ends.
Vec2 extended_point(const Polyline & line, double s)
{
  if (s < 0.0) {
    return line.point_at(0.0) + unit_from_angle(line.segment_heading(0)) * s;
  }
  if (s > line.length()) {
    const double h = line.segment_heading(line.segment_count() - 1);
    return line.point_at(line.length()) + unit_from_angle(h) * (s - line.length());
  }
  return line.point_at(s);
}

double extended_heading(const Polyline & line, double s)
{
  if (s < 0.0) {
    return line.segment_heading(0);
  }
  if (s > line.length()) {
    return line.segment_heading(line.segment_count() - 1);
  }
  return line.heading_at(s);
}

}  // namespace

std::string_view to_string(PlannerKind value)
{
  return kPlannerNames[static_cast<std::size_t>(value)];
}

PlannerKind parse_planner_kind(std::string_view name)
{
  for (std::size_t i = 0; i < kPlannerNames.size(); ++i) {
    if (kPlannerNames[i] == name) {
      return static_cast<PlannerKind>(i);
    }
  }
  fail(ErrorCode::kConfigError, "unknown planner '" + std::string(name) + "'");
}

Trajectory replay_planner(const Scene & scene, std::size_t frame)
{
  return ego_future_trajectory(scene, frame);
}

Trajectory constant_velocity_planner(const Scene & scene, std::size_t frame)
{
  const auto & s = anchor_state(scene, frame);
  Trajectory out;
  for (std::size_t k = 1; k <= kPlanSteps; ++k) {
    const double t = static_cast<double>(k) * kPlanStepSeconds;
    out.waypoints.push_back({t, s.speed * t, 0.0});
  }
  return out;
}

Trajectory lane_follow_planner(const Scene & scene, std::size_t frame, const PlannerConfig & config)
{
  const auto & s = anchor_state(scene, frame);
  const LaneMap lanes(scene.lanes);
  const auto match = lane_association(s.pose, scene.ego.category, lanes, config.lane);
  if (!match) {
    fail(ErrorCode::kNoLane, "ego has no lane at frame " + std::to_string(frame));
  }
  const Polyline & line = lanes.polyline(match->lane_index);
  const double speed = config.target_speed.value_or(s.speed);
  const double direction = match->reversed ? -1.0 : 1.0;
  Trajectory out;
  for (std::size_t k = 1; k <= kPlanSteps; ++k) {
    const double t = static_cast<double>(k) * kPlanStepSeconds;
    const double station = match->frenet.s + direction * speed * t;
    const Vec2 normal = perp_left(unit_from_angle(extended_heading(line, station)));
    const Vec2 p = extended_point(line, station) + normal * match->frenet.d;
    const Vec2 local = to_local(s.pose, p);
    out.waypoints.push_back({t, local.x, local.y});
  }
  return out;
}

Trajectory run_planner(PlannerKind kind, const Scene & scene, std::size_t frame,
  const PlannerConfig & config)
{
  switch (kind) {
    case PlannerKind::kReplay:
      return replay_planner(scene, frame);
    case PlannerKind::kConstantVelocity:
      return constant_velocity_planner(scene, frame);
    case PlannerKind::kLaneFollow:
      return lane_follow_planner(scene, frame, config);
  }
  fail(ErrorCode::kInternal, "unhandled planner kind");
}

}  // namespace drivelab
