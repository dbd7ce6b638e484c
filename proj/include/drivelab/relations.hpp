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

#include "drivelab/geometry.hpp"
#include "drivelab/scene.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace drivelab
{

enum class LaneMode { kLeft, kRight, kAhead, kBehind, kNoton };
enum class HomotopyClass { kStatic, kClockwise, kCounterClockwise };
enum class EgoLaneDecision { kKeepLane, kLeftLaneChange, kRightLaneChange, kStraddle };

std::string_view to_string(LaneMode value);
std::string_view to_string(HomotopyClass value);
std::string_view to_string(EgoLaneDecision value);
LaneMode parse_lane_mode(std::string_view name);
EgoLaneDecision parse_ego_lane_decision(std::string_view name);

struct Homotopy
{
  HomotopyClass cls{HomotopyClass::kStatic};
  double winding{0.0};  // radians, signed
};

struct RelationsConfig
{
  LaneAssociationConfig lane;
  int k_lat{2};
  int k_lon{3};
  double theta_s_deg{30.0};
  double eps_rel{0.05};
  double eps_lon{1e-6};
  double turn_deg{60.0};
  double uturn_deg{150.0};
  double v_rev{-0.2};
  double d_prep{30.0};
  double window_s{6.0};
  double yaw_rate_min{0.1};     // rad/s, below this a step does not count as turning
  double merge_distance{5.0};   // turning runs separated by less travel are one maneuver
};

/// Topological relation of an agent lane to the ego lane. Lateral neighbour relations take
/// precedence over longitudinal ones; s values are arc lengths on the respective lanes.
/// Throws kTopologyCycle when a neighbour walk revisits a lane.
LaneMode agent_ego_lane_mode(std::optional<std::size_t> agent_lane,
  std::optional<std::size_t> ego_lane, const LaneMap & topology, double agent_s, double ego_s,
  bool ego_reversed = false, const RelationsConfig & config = {});

/// Winding of the relative position b - a. Throws kDegenerate when the agents coincide and
/// kLengthError unless both sequences share at least two frames.
Homotopy classify_homotopy(std::span<const Vec2> a, std::span<const Vec2> b,
  double theta_s = std::numbers::pi / 6.0, double eps_rel = 0.05);

/// Per-frame ego lane association using the ego's own category.
std::vector<std::optional<LaneMatch>> ego_lane_matches(
  const Scene & scene, const LaneMap & lanes, const RelationsConfig & config = {});

std::vector<EgoLaneDecision> ego_lane_decisions(const Scene & scene,
  const RelationsConfig & config = {});
std::vector<EgoLaneDecision> ego_lane_decisions(const Scene & scene, const LaneMap & lanes,
  std::span<const std::optional<LaneMatch>> ego_matches, const RelationsConfig & config = {});

/// Offline road-level navigation labels derived from the full ego episode.
std::vector<NavCommand> label_nav_commands(const Scene & scene,
  const RelationsConfig & config = {});

/// Everything the interaction labeler consumes, computed once per scene.
struct SceneRelations
{
  std::vector<std::optional<LaneMatch>> ego_lanes;
  /// agent_lanes[agent][frame]; empty optional for invalid or unassociated frames.
  std::vector<std::vector<std::optional<LaneMatch>>> agent_lanes;
  std::vector<std::vector<LaneMode>> lane_modes;  // [agent][frame]
  std::vector<EgoLaneDecision> ego_decisions;
  std::vector<NavCommand> nav_commands;
};

SceneRelations compute_relations(const Scene & scene, const RelationsConfig & config = {});

}  // namespace drivelab
