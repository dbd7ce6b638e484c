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

#pragma once

#include "drivelab/vec2.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drivelab
{

struct Pose2
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};  // radians, (-pi, pi]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2 &, const Pose2 &) = default;
};

enum class Category {
  kCar,
  kTruck,
  kBus,
  kMotorcycle,
  kBicycle,
  kPedestrian,
  kTrafficCone,
  kBarrier,
  kOther,
};
inline constexpr std::size_t kCategoryCount = 9;

enum class LaneSemantic { kNormal, kIntersection, kCrosswalk };
inline constexpr std::size_t kLaneSemanticCount = 3;

enum class NavCommand {
  kKeepForward,
  kPrepareTurnLeft,
  kPrepareTurnRight,
  kTurnLeft,
  kTurnRight,
  kUTurnLeft,
  kUTurnRight,
  kThreePointTurnLeft,
  kThreePointTurnRight,
};

enum class ScenarioTag {
  kThreePointTurn,
  kResumeFromStop,
  kOvertakeOncoming,
  kConstructionZone,
  kNominal,
};

std::string_view to_string(Category value);
std::string_view to_string(LaneSemantic value);
std::string_view to_string(NavCommand value);
std::string_view to_string(ScenarioTag value);

// Parsers throw Error(kSchemaError) on unknown names.
Category parse_category(std::string_view name);
LaneSemantic parse_lane_semantic(std::string_view name);
NavCommand parse_nav_command(std::string_view name);
ScenarioTag parse_scenario_tag(std::string_view name);

bool is_vehicle(Category category);
/// Categories whose heading is unreliable for lane alignment.
bool is_heading_free(Category category);

struct Lane
{
  std::string id;
  std::vector<Vec2> centerline;
  double half_width{0.0};
  std::optional<std::string> left_neighbor;
  std::optional<std::string> right_neighbor;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;
  LaneSemantic semantic{LaneSemantic::kNormal};

  friend bool operator==(const Lane &, const Lane &) = default;
};

struct AgentState
{
  Pose2 pose;
  double speed{0.0};  // signed longitudinal speed, m/s
  double length{0.0};
  double width{0.0};
  bool valid{false};

  friend bool operator==(const AgentState &, const AgentState &) = default;
};

struct AgentTrack
{
  std::string id;
  Category category{Category::kCar};
  std::vector<AgentState> states;

  friend bool operator==(const AgentTrack &, const AgentTrack &) = default;
};

struct Scene
{
  std::string id;
  double frame_rate_hz{2.0};
  std::vector<Lane> lanes;
  std::vector<AgentTrack> agents;
  AgentTrack ego;
  std::vector<NavCommand> nav_commands;
  std::optional<ScenarioTag> scenario_tag;

  std::size_t frame_count() const { return ego.states.size(); }
  double dt() const { return 1.0 / frame_rate_hz; }
  const Lane * find_lane(std::string_view lane_id) const;
  const AgentTrack * find_agent(std::string_view agent_id) const;

  friend bool operator==(const Scene &, const Scene &) = default;
};

struct Waypoint
{
  double t{0.0};
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Waypoint &, const Waypoint &) = default;
};

struct Trajectory
{
  std::vector<Waypoint> waypoints;

  std::size_t size() const { return waypoints.size(); }
  friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

inline constexpr double kDefaultMoveEpsilon = 1e-3;

/// Throws Error with kSchemaError, kRefError or kLengthError on the first violation found.
void validate_scene(const Scene & scene);

/// Parses and validates a scene JSON document.
Scene load_scene(std::string_view document);
Scene load_scene_file(const std::string & path);

/// Canonical form: sorted keys, reals rounded to 9 significant digits, two-space indent.
std::string save_scene(const Scene & scene);

/// Heading of segment k -> k+1 for each waypoint; the last waypoint repeats the previous
/// heading and segments shorter than `move_epsilon` carry the previous heading forward.
std::vector<double> headings_from_waypoints(
  const Trajectory & trajectory, double initial_heading,
  double move_epsilon = kDefaultMoveEpsilon);

/// Expresses a global point in the frame of `origin` (x forward, y left).
Vec2 to_local(const Pose2 & origin, Vec2 global);
Vec2 to_global(const Pose2 & origin, Vec2 local);

}  // namespace drivelab
