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
#include <string_view>

namespace drivelab
{

enum class PlannerKind { kReplay, kConstantVelocity, kLaneFollow };

std::string_view to_string(PlannerKind value);
/// Accepts "replay", "constant_velocity" and "lane_follow"; throws kConfigError otherwise.
PlannerKind parse_planner_kind(std::string_view name);

struct PlannerConfig
{
  std::optional<double> target_speed;  // lane follow; defaults to the current speed
  LaneAssociationConfig lane;
};

/// Ground-truth future; throws kInsufficientFuture near the scene end.
Trajectory replay_planner(const Scene & scene, std::size_t frame);

/// Extrapolates the current velocity vector for 3 s.
Trajectory constant_velocity_planner(const Scene & scene, std::size_t frame);

/// Arc-length stepping along the associated lane; past either end the last tangent is
/// followed. Throws kNoLane when the ego has no lane.
Trajectory lane_follow_planner(const Scene & scene, std::size_t frame,
  const PlannerConfig & config = {});

Trajectory run_planner(PlannerKind kind, const Scene & scene, std::size_t frame,
  const PlannerConfig & config = {});

}  // namespace drivelab
