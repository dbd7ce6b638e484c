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

#include "drivelab/relations.hpp"
#include "drivelab/scene.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drivelab
{

enum class InteractionKind {
  kBypassCones,
  kYieldToPedestrian,
  kYieldToVehicle,
  kOvertakeStraddle,
  kOvertakeLaneChange,
};
enum class PassSide { kLeft, kRight };
enum class CriticalReason { kHasInteraction, kInEgoCorridor, kNone };

std::string_view to_string(InteractionKind value);
std::string_view to_string(PassSide value);
std::string_view to_string(CriticalReason value);
InteractionKind parse_interaction_kind(std::string_view name);
PassSide parse_pass_side(std::string_view name);
CriticalReason parse_critical_reason(std::string_view name);

struct InteractionLabel
{
  std::string agent_id;
  InteractionKind kind{InteractionKind::kOvertakeLaneChange};
  std::optional<PassSide> side;  // set for bypass and overtake kinds
  std::size_t start{0};          // inclusive frame span
  std::size_t end{0};

  bool covers(std::size_t frame) const { return start <= frame && frame <= end; }
  friend bool operator==(const InteractionLabel &, const InteractionLabel &) = default;
};

struct Criticality
{
  std::string agent_id;
  bool critical{false};
  CriticalReason reason{CriticalReason::kNone};

  friend bool operator==(const Criticality &, const Criticality &) = default;
};

struct InteractionConfig
{
  double t_c{3.0};              // corridor horizon, seconds
  double corridor_margin{1.0};  // added to half the ego width
  double v_stop{0.3};
  double yield_lookahead{20.0};  // meters of future ego path checked while stopped
  int max_gap_frames{2};         // NOTON frames tolerated inside a lane-mode pattern
};

/// Heuristic labels in canonical order (agent id, start frame, kind).
std::vector<InteractionLabel> label_interactions(const Scene & scene,
  const SceneRelations & relations, const InteractionConfig & config = {});

/// One entry per agent valid at `frame`, in scene order.
std::vector<Criticality> critical_objects(const Scene & scene,
  std::span<const InteractionLabel> labels, std::size_t frame,
  const InteractionConfig & config = {});

/// Ego positions from `frame` until `horizon_s` later (clipped to the scene).
std::vector<Vec2> ego_future_path(const Scene & scene, std::size_t frame, double horizon_s);

/// True when the agent footprint comes within `dilation` of the path.
bool footprint_near_path(const AgentState & agent, std::span<const Vec2> path, double dilation);

struct LabelOverride
{
  std::string scene_id;
  InteractionLabel label;
  bool reject{false};  // drop matching heuristic labels without adding a replacement
};

/// Overrides win on (agent_id, kind, overlapping span). Result in canonical order.
std::vector<InteractionLabel> merge_overrides(std::vector<InteractionLabel> heuristic,
  const std::string & scene_id, std::span<const LabelOverride> overrides);

/// Parses the sidecar JSON list; each entry carries scene_id, agent_id, kind, side, start,
/// end and an optional boolean reject.
std::vector<LabelOverride> parse_label_sidecar(std::string_view document);

void sort_labels(std::vector<InteractionLabel> & labels);

}  // namespace drivelab
