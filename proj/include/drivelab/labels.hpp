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

#include "drivelab/interaction.hpp"
#include "drivelab/relations.hpp"
#include "drivelab/scene.hpp"

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace drivelab
{

/// Everything the labeling stage emits for one scene.
struct SceneLabels
{
  std::string scene_id;
  std::vector<NavCommand> nav_commands;
  std::vector<EgoLaneDecision> ego_decisions;
  std::vector<std::pair<std::string, std::vector<LaneMode>>> lane_modes;  // scene agent order
  std::vector<InteractionLabel> interactions;

  const std::vector<LaneMode> * modes_of(std::string_view agent_id) const;
  friend bool operator==(const SceneLabels &, const SceneLabels &) = default;
};

SceneLabels label_scene(const Scene & scene, const RelationsConfig & relations = {},
  const InteractionConfig & interaction = {}, std::span<const LabelOverride> overrides = {});

/// Single-line JSON with sorted keys, suitable for JSON-lines files.
std::string labels_to_json(const SceneLabels & labels);
SceneLabels labels_from_json(std::string_view document);

}  // namespace drivelab
