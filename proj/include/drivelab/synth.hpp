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

#include "drivelab/labels.hpp"
#include "drivelab/scene.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace drivelab
{

struct ThreePointTurnParams
{
  double radius{5.0};                          // meters, >= 3
  std::array<double, 3> arcs_deg{80.0, 60.0, 40.0};  // forward, reverse, forward; sum 180
  double speed{2.0};                           // maneuver speed magnitude, m/s
  double pause_s{1.0};                         // standstill between phases
};

struct SynthParams
{
  double lane_length{120.0};
  double lane_width{3.7};
  std::size_t frames{40};
  double frame_rate_hz{2.0};
  double speed_min{3.0};
  double speed_max{12.0};
  double ego_length{4.5};
  double ego_width{2.0};
  bool global_transform{true};  // random rigid placement of the whole scene
  ThreePointTurnParams three_point_turn;
};

/// Throws kParamError when the parameters cannot produce a valid scene.
void validate_synth_params(const SynthParams & params);

/// Deterministic in (kind, seed, params). The PRNG is std::mt19937_64 seeded with `seed`;
/// uniform reals take the top 53 bits of each draw.
Scene synth_scene(ScenarioTag kind, std::uint64_t seed, const SynthParams & params = {});

/// Three-phase turn starting at `start` (forward left arc, reverse arc with opposite steer,
/// forward left arc). States are sampled at `dt` until the maneuver completes.
std::vector<AgentState> synth_three_point_turn(const Pose2 & start,
  const ThreePointTurnParams & params, double dt, double length = 4.5, double width = 2.0);

struct CorpusEntry
{
  std::size_t count{0};
  double fraction{0.0};
  std::uint64_t first_seed{0};
  std::uint64_t last_seed{0};
};

struct CorpusManifest
{
  std::vector<std::pair<ScenarioTag, CorpusEntry>> kinds;  // input order
  std::size_t total{0};
  std::uint64_t base_seed{0};
};

/// Kinds in the order given; seeds run sequentially from `base_seed` across the whole corpus.
/// Each scene is handed to `sink` as soon as it is generated.
CorpusManifest synth_corpus(const std::vector<std::pair<ScenarioTag, std::size_t>> & spec,
  std::uint64_t base_seed, const SynthParams & params,
  const std::function<void(Scene &&)> & sink);

std::string manifest_to_json(const CorpusManifest & manifest);

/// Parses {"KIND": count, ...}; JSON object order is not significant, kinds run in enum order.
std::vector<std::pair<ScenarioTag, std::size_t>> parse_corpus_spec(std::string_view document);

/// True when the labels recover the structure that defines the scene's scenario tag.
bool closure_holds(const Scene & scene, const SceneLabels & labels, double v_stop = 0.3);

}  // namespace drivelab
