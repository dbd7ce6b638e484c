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

#include "drivelab/scene.hpp"

#include "drivelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace drivelab
{

namespace
{

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
  "CAR", "TRUCK", "BUS", "MOTORCYCLE", "BICYCLE", "PEDESTRIAN", "TRAFFIC_CONE", "BARRIER", "OTHER"};
constexpr std::array<std::string_view, kLaneSemanticCount> kSemanticNames = {
  "NORMAL", "INTERSECTION", "CROSSWALK"};
constexpr std::array<std::string_view, 9> kNavNames = {
  "KEEP_FORWARD", "PREPARE_TURN_LEFT", "PREPARE_TURN_RIGHT", "TURN_LEFT", "TURN_RIGHT",
  "U_TURN_LEFT", "U_TURN_RIGHT", "THREE_POINT_TURN_LEFT", "THREE_POINT_TURN_RIGHT"};
constexpr std::array<std::string_view, 5> kTagNames = {
  "THREE_POINT_TURN", "RESUME_FROM_STOP", "OVERTAKE_ONCOMING", "CONSTRUCTION_ZONE", "NOMINAL"};

template <typename Enum, std::size_t N>
Enum parse_name(const std::array<std::string_view, N> & names, std::string_view name,
  std::string_view what)
{
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    fail(ErrorCode::kSchemaError, "unknown " + std::string(what) + " '" + std::string(name) + "'");
  }
  return static_cast<Enum>(std::distance(names.begin(), it));
}

bool finite(double v) { return std::isfinite(v); }

void check_finite(double v, const std::string & where)
{
  if (!finite(v)) {
    fail(ErrorCode::kSchemaError, where + ": non-finite value");
  }
}

void validate_track(const AgentTrack & track, std::size_t frames, const std::string & where,
  bool require_all_valid)
{
  if (track.id.empty()) {
    fail(ErrorCode::kSchemaError, where + ".id: empty identifier");
  }
  if (track.states.size() != frames) {
    fail(ErrorCode::kLengthError, where + ".states: expected " + std::to_string(frames) +
      " frames, got " + std::to_string(track.states.size()));
  }
  for (std::size_t f = 0; f < track.states.size(); ++f) {
    const auto & s = track.states[f];
    const std::string at = where + ".states[" + std::to_string(f) + "]";
    check_finite(s.pose.x, at + ".x");
    check_finite(s.pose.y, at + ".y");
    check_finite(s.pose.heading, at + ".heading");
    check_finite(s.speed, at + ".speed");
    check_finite(s.length, at + ".length");
    check_finite(s.width, at + ".width");
    if (s.valid && (s.length <= 0.0 || s.width <= 0.0)) {
      fail(ErrorCode::kSchemaError, at + ": valid state needs positive length and width");
    }
    if (require_all_valid && !s.valid) {
      fail(ErrorCode::kSchemaError, at + ": ego states must all be valid");
    }
  }
}

}  // namespace

std::string_view to_string(Category value) { return kCategoryNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(LaneSemantic value) { return kSemanticNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(NavCommand value) { return kNavNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(ScenarioTag value) { return kTagNames[static_cast<std::size_t>(value)]; }

Category parse_category(std::string_view name)
{
  return parse_name<Category>(kCategoryNames, name, "category");
}
LaneSemantic parse_lane_semantic(std::string_view name)
{
  return parse_name<LaneSemantic>(kSemanticNames, name, "lane semantic");
}
NavCommand parse_nav_command(std::string_view name)
{
  return parse_name<NavCommand>(kNavNames, name, "navigation command");
}
ScenarioTag parse_scenario_tag(std::string_view name)
{
  return parse_name<ScenarioTag>(kTagNames, name, "scenario tag");
}

bool is_vehicle(Category category)
{
  switch (category) {
    case Category::kCar:
    case Category::kTruck:
    case Category::kBus:
    case Category::kMotorcycle:
    case Category::kBicycle:
    case Category::kOther:
      return true;
    default:
      return false;
  }
}

bool is_heading_free(Category category)
{
  return category == Category::kPedestrian || category == Category::kTrafficCone ||
         category == Category::kBarrier;
}

const Lane * Scene::find_lane(std::string_view lane_id) const
{
  for (const auto & lane : lanes) {
    if (lane.id == lane_id) {
      return &lane;
    }
  }
  return nullptr;
}

const AgentTrack * Scene::find_agent(std::string_view agent_id) const
{
  for (const auto & agent : agents) {
    if (agent.id == agent_id) {
      return &agent;
    }
  }
  return nullptr;
}

void validate_scene(const Scene & scene)
{
  if (scene.id.empty()) {
    fail(ErrorCode::kSchemaError, "id: empty scene identifier");
  }
  if (!finite(scene.frame_rate_hz) || scene.frame_rate_hz <= 0.0) {
    fail(ErrorCode::kSchemaError, "frame_rate_hz: must be a positive finite number");
  }
  const std::size_t frames = scene.ego.states.size();
  if (frames == 0) {
    fail(ErrorCode::kLengthError, "ego.states: scene needs at least one frame");
  }

  std::set<std::string> lane_ids;
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    const auto & lane = scene.lanes[i];
    const std::string at = "lanes[" + std::to_string(i) + "]";
    if (lane.id.empty()) {
      fail(ErrorCode::kSchemaError, at + ".id: empty identifier");
    }
    if (!lane_ids.insert(lane.id).second) {
      fail(ErrorCode::kRefError, at + ".id: duplicate lane id '" + lane.id + "'");
    }
    if (lane.centerline.size() < 2) {
      fail(ErrorCode::kSchemaError, at + ".centerline: needs at least 2 points");
    }
    for (std::size_t k = 0; k < lane.centerline.size(); ++k) {
      check_finite(lane.centerline[k].x, at + ".centerline[" + std::to_string(k) + "]");
      check_finite(lane.centerline[k].y, at + ".centerline[" + std::to_string(k) + "]");
      if (k > 0 && norm(lane.centerline[k] - lane.centerline[k - 1]) <= 0.0) {
        fail(ErrorCode::kSchemaError,
          at + ".centerline[" + std::to_string(k) + "]: zero-length segment");
      }
    }
    check_finite(lane.half_width, at + ".half_width");
    if (lane.half_width <= 0.0) {
      fail(ErrorCode::kSchemaError, at + ".half_width: must be positive");
    }
  }
  for (std::size_t i = 0; i < scene.lanes.size(); ++i) {
    const auto & lane = scene.lanes[i];
    const std::string at = "lanes[" + std::to_string(i) + "]";
    auto check_ref = [&](const std::string & ref, const std::string & field) {
        if (!lane_ids.count(ref)) {
          fail(ErrorCode::kRefError, at + "." + field + ": unknown lane id '" + ref + "'");
        }
      };
    if (lane.left_neighbor) {check_ref(*lane.left_neighbor, "left_neighbor");}
    if (lane.right_neighbor) {check_ref(*lane.right_neighbor, "right_neighbor");}
    for (const auto & s : lane.successors) {check_ref(s, "successors");}
    for (const auto & p : lane.predecessors) {check_ref(p, "predecessors");}
  }

  validate_track(scene.ego, frames, "ego", true);
  std::unordered_set<std::string> agent_ids{scene.ego.id};
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const std::string at = "agents[" + std::to_string(i) + "]";
    validate_track(scene.agents[i], frames, at, false);
    if (!agent_ids.insert(scene.agents[i].id).second) {
      fail(ErrorCode::kRefError, at + ".id: duplicate agent id '" + scene.agents[i].id + "'");
    }
  }
  if (scene.nav_commands.size() != frames) {
    fail(ErrorCode::kLengthError, "nav_commands: expected " + std::to_string(frames) +
      " entries, got " + std::to_string(scene.nav_commands.size()));
  }
}

std::vector<double> headings_from_waypoints(
  const Trajectory & trajectory, double initial_heading, double move_epsilon)
{
  const auto & wp = trajectory.waypoints;
  std::vector<double> headings(wp.size(), wrap_angle(initial_heading));
  double previous = wrap_angle(initial_heading);
  for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
    const Vec2 step{wp[k + 1].x - wp[k].x, wp[k + 1].y - wp[k].y};
    if (norm(step) >= move_epsilon) {
      previous = std::atan2(step.y, step.x);
    }
    headings[k] = wrap_angle(previous);
  }
  if (wp.size() >= 2) {
    headings.back() = headings[wp.size() - 2];
  }
  return headings;
}

Vec2 to_local(const Pose2 & origin, Vec2 global)
{
  const Vec2 d = global - origin.position();
  const double c = std::cos(origin.heading);
  const double s = std::sin(origin.heading);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Vec2 to_global(const Pose2 & origin, Vec2 local)
{
  const double c = std::cos(origin.heading);
  const double s = std::sin(origin.heading);
  return {origin.x + c * local.x - s * local.y, origin.y + s * local.x + c * local.y};
}

}  // namespace drivelab
