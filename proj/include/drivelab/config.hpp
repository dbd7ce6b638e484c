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
#include "drivelab/metrics.hpp"
#include "drivelab/planners.hpp"
#include "drivelab/qa.hpp"
#include "drivelab/relations.hpp"
#include "drivelab/synth.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace drivelab
{

/// Every tunable threshold of the toolkit. Serialized as one JSON object with sections
/// "lane", "relations", "interaction", "metrics", "qa", "planner" and "synth".
struct ToolkitConfig
{
  std::uint64_t seed{0};
  RelationsConfig relations;  // lane association lives in relations.lane
  InteractionConfig interaction;
  MetricsConfig metrics;
  std::size_t perception_distractors{8};
  double distractor_ratio{1.0};
  PlannerKind planner{PlannerKind::kReplay};
  PlannerConfig planner_config;  // lane settings are taken from relations.lane
  SynthParams synth;

  QAConfig qa_config() const;
  PlannerConfig effective_planner_config() const;
};

/// Resolved configuration as pretty JSON with sorted keys.
std::string config_to_json(const ToolkitConfig & config);

/// Layers a (possibly partial) JSON document over `base`. Unknown keys and wrongly typed
/// values throw kConfigError.
ToolkitConfig merge_config_json(const ToolkitConfig & base, std::string_view document);

/// Sets one dotted key such as "metrics.w_lon". `value` is parsed as JSON; text that is not
/// valid JSON is taken as a string.
ToolkitConfig config_set(const ToolkitConfig & base, std::string_view key, std::string_view value);

}  // namespace drivelab
