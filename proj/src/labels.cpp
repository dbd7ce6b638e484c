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

#include "drivelab/labels.hpp"

#include "json_util.hpp"

namespace drivelab
{

using json_util::Json;

const std::vector<LaneMode> * SceneLabels::modes_of(std::string_view agent_id) const
{
  for (const auto & [id, modes] : lane_modes) {
    if (id == agent_id) {
      return &modes;
    }
  }
  return nullptr;
}

SceneLabels label_scene(const Scene & scene, const RelationsConfig & relations,
  const InteractionConfig & interaction, std::span<const LabelOverride> overrides)
{
  const auto rel = compute_relations(scene, relations);
  SceneLabels out;
  out.scene_id = scene.id;
  out.nav_commands = rel.nav_commands;
  out.ego_decisions = rel.ego_decisions;
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    out.lane_modes.emplace_back(scene.agents[a].id, rel.lane_modes[a]);
  }
  out.interactions = merge_overrides(label_interactions(scene, rel, interaction), scene.id,
      overrides);
  return out;
}

std::string labels_to_json(const SceneLabels & labels)
{
  Json doc = Json::object();
  doc["scene_id"] = labels.scene_id;
  Json nav = Json::array();
  for (const auto c : labels.nav_commands) {nav.push_back(to_string(c));}
  doc["nav_commands"] = nav;
  Json decisions = Json::array();
  for (const auto d : labels.ego_decisions) {decisions.push_back(to_string(d));}
  doc["ego_lane_decisions"] = decisions;
  Json modes = Json::array();
  for (const auto & [id, seq] : labels.lane_modes) {
    Json m = Json::array();
    for (const auto v : seq) {m.push_back(to_string(v));}
    modes.push_back({{"agent_id", id}, {"modes", m}});
  }
  doc["lane_modes"] = modes;
  Json inter = Json::array();
  for (const auto & l : labels.interactions) {
    inter.push_back({{"agent_id", l.agent_id}, {"kind", to_string(l.kind)},
        {"side", l.side ? Json(to_string(*l.side)) : Json(nullptr)}, {"start", l.start},
        {"end", l.end}});
  }
  doc["interactions"] = inter;
  return doc.dump();
}

SceneLabels labels_from_json(std::string_view document)
{
  using json_util::field;
  using json_util::get_string;
  const auto doc = json_util::parse(document, "labels");
  json_util::require_object(doc, "labels");
  json_util::only_keys(doc, {"scene_id", "nav_commands", "ego_lane_decisions", "lane_modes",
      "interactions"}, "labels");
  SceneLabels out;
  out.scene_id = get_string(field(doc, "scene_id", "labels"), "labels.scene_id");
  const auto strings = [](const Json & arr, const std::string & at) {
      json_util::require_array(arr, at);
      std::vector<std::string> v;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        v.push_back(get_string(arr[i], at + "[" + std::to_string(i) + "]"));
      }
      return v;
    };
  for (const auto & s : strings(field(doc, "nav_commands", "labels"), "labels.nav_commands")) {
    out.nav_commands.push_back(parse_nav_command(s));
  }
  for (const auto & s :
    strings(field(doc, "ego_lane_decisions", "labels"), "labels.ego_lane_decisions"))
  {
    out.ego_decisions.push_back(parse_ego_lane_decision(s));
  }
  const auto & modes = field(doc, "lane_modes", "labels");
  json_util::require_array(modes, "labels.lane_modes");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string at = "labels.lane_modes[" + std::to_string(i) + "]";
    json_util::require_object(modes[i], at);
    json_util::only_keys(modes[i], {"agent_id", "modes"}, at);
    std::vector<LaneMode> seq;
    for (const auto & s : strings(field(modes[i], "modes", at), at + ".modes")) {
      seq.push_back(parse_lane_mode(s));
    }
    out.lane_modes.emplace_back(get_string(field(modes[i], "agent_id", at), at + ".agent_id"),
      std::move(seq));
  }
  // Interaction entries share the sidecar record layout.
  Json inter = field(doc, "interactions", "labels");
  json_util::require_array(inter, "labels.interactions");
  for (auto & e : inter) {
    if (e.is_object()) {
      e["scene_id"] = out.scene_id;
    }
  }
  for (auto & o : parse_label_sidecar(inter.dump())) {
    out.interactions.push_back(std::move(o.label));
  }
  sort_labels(out.interactions);
  return out;
}

}  // namespace drivelab
