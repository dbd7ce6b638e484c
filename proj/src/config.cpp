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

#include "drivelab/config.hpp"

#include "json_util.hpp"

#include <cmath>
#include <string>

namespace drivelab
{

namespace
{

using json_util::Json;

Json to_json(const ToolkitConfig & c)
{
  const auto & r = c.relations;
  const auto & i = c.interaction;
  const auto & s = c.synth;
  const auto & t = s.three_point_turn;
  Json doc;
  doc["seed"] = c.seed;
  doc["lane"] = {{"margin", r.lane.margin}, {"align_deg", r.lane.align_deg},
    {"allow_reverse", r.lane.allow_reverse}};
  doc["relations"] = {{"k_lat", r.k_lat}, {"k_lon", r.k_lon}, {"theta_s_deg", r.theta_s_deg},
    {"eps_rel", r.eps_rel}, {"eps_lon", r.eps_lon}, {"turn_deg", r.turn_deg},
    {"uturn_deg", r.uturn_deg}, {"v_rev", r.v_rev}, {"d_prep", r.d_prep},
    {"window_s", r.window_s}, {"yaw_rate_min", r.yaw_rate_min},
    {"merge_distance", r.merge_distance}};
  doc["interaction"] = {{"t_c", i.t_c}, {"corridor_margin", i.corridor_margin},
    {"v_stop", i.v_stop}, {"yield_lookahead", i.yield_lookahead},
    {"max_gap_frames", i.max_gap_frames}};
  doc["metrics"] = {{"w_lon", c.metrics.w_lon}, {"grounding_gate", c.metrics.grounding_gate}};
  doc["qa"] = {{"perception_distractors", c.perception_distractors},
    {"distractor_ratio", c.distractor_ratio}};
  doc["planner"] = {{"kind", std::string(to_string(c.planner))},
    {"target_speed", c.planner_config.target_speed ? Json(*c.planner_config.target_speed) :
      Json(nullptr)}};
  doc["synth"] = {{"lane_length", s.lane_length}, {"lane_width", s.lane_width},
    {"frames", s.frames}, {"frame_rate_hz", s.frame_rate_hz}, {"speed_min", s.speed_min},
    {"speed_max", s.speed_max}, {"ego_length", s.ego_length}, {"ego_width", s.ego_width},
    {"global_transform", s.global_transform},
    {"three_point_turn", {{"radius", t.radius}, {"arcs_deg", t.arcs_deg}, {"speed", t.speed},
      {"pause_s", t.pause_s}}}};
  return doc;
}

[[noreturn]] void config_fail(const std::string & where, const std::string & what)
{
  fail(ErrorCode::kConfigError, "config " + where + ": " + what);
}

// Rejects keys the defaults do not have and values whose JSON type differs.
void check_layer(const Json & layer, const Json & reference, const std::string & where)
{
  if (!layer.is_object()) {
    config_fail(where.empty() ? "root" : where, "expected an object");
  }
  for (auto it = layer.begin(); it != layer.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    const auto ref = reference.find(it.key());
    if (ref == reference.end()) {
      config_fail(path, "unknown key");
    }
    const Json & v = *it;
    if (ref->is_object()) {
      check_layer(v, *ref, path);
    } else if (path == "planner.target_speed") {
      if (!v.is_null() && !v.is_number()) {config_fail(path, "expected a number or null");}
    } else if (ref->is_boolean()) {
      if (!v.is_boolean()) {config_fail(path, "expected a boolean");}
    } else if (ref->is_string()) {
      if (!v.is_string()) {config_fail(path, "expected a string");}
    } else if (ref->is_number_unsigned()) {
      if (!v.is_number_unsigned()) {config_fail(path, "expected a non-negative integer");}
    } else if (ref->is_number_integer()) {
      if (!v.is_number_integer()) {config_fail(path, "expected an integer");}
    } else if (ref->is_number()) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        config_fail(path, "expected a finite number");
      }
    } else if (ref->is_array()) {
      if (!v.is_array() || v.size() != ref->size()) {
        config_fail(path, "expected an array of " + std::to_string(ref->size()) + " numbers");
      }
      for (const auto & e : v) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
          config_fail(path, "expected finite numbers");
        }
      }
    }
  }
}

void overlay(Json & target, const Json & layer)
{
  for (auto it = layer.begin(); it != layer.end(); ++it) {
    if (it->is_object()) {
      overlay(target[it.key()], *it);
    } else {
      target[it.key()] = *it;
    }
  }
}

ToolkitConfig from_json(const Json & d)
{
  ToolkitConfig c;
  c.seed = d["seed"].get<std::uint64_t>();
  const auto & lane = d["lane"];
  c.relations.lane.margin = lane["margin"].get<double>();
  c.relations.lane.align_deg = lane["align_deg"].get<double>();
  c.relations.lane.allow_reverse = lane["allow_reverse"].get<bool>();
  const auto & r = d["relations"];
  c.relations.k_lat = r["k_lat"].get<int>();
  c.relations.k_lon = r["k_lon"].get<int>();
  c.relations.theta_s_deg = r["theta_s_deg"].get<double>();
  c.relations.eps_rel = r["eps_rel"].get<double>();
  c.relations.eps_lon = r["eps_lon"].get<double>();
  c.relations.turn_deg = r["turn_deg"].get<double>();
  c.relations.uturn_deg = r["uturn_deg"].get<double>();
  c.relations.v_rev = r["v_rev"].get<double>();
  c.relations.d_prep = r["d_prep"].get<double>();
  c.relations.window_s = r["window_s"].get<double>();
  c.relations.yaw_rate_min = r["yaw_rate_min"].get<double>();
  c.relations.merge_distance = r["merge_distance"].get<double>();
  const auto & i = d["interaction"];
  c.interaction.t_c = i["t_c"].get<double>();
  c.interaction.corridor_margin = i["corridor_margin"].get<double>();
  c.interaction.v_stop = i["v_stop"].get<double>();
  c.interaction.yield_lookahead = i["yield_lookahead"].get<double>();
  c.interaction.max_gap_frames = i["max_gap_frames"].get<int>();
  c.metrics.w_lon = d["metrics"]["w_lon"].get<double>();
  c.metrics.grounding_gate = d["metrics"]["grounding_gate"].get<double>();
  c.perception_distractors = d["qa"]["perception_distractors"].get<std::size_t>();
  c.distractor_ratio = d["qa"]["distractor_ratio"].get<double>();
  c.planner = parse_planner_kind(d["planner"]["kind"].get<std::string>());
  const auto & ts = d["planner"]["target_speed"];
  if (!ts.is_null()) {c.planner_config.target_speed = ts.get<double>();}
  const auto & s = d["synth"];
  c.synth.lane_length = s["lane_length"].get<double>();
  c.synth.lane_width = s["lane_width"].get<double>();
  c.synth.frames = s["frames"].get<std::size_t>();
  c.synth.frame_rate_hz = s["frame_rate_hz"].get<double>();
  c.synth.speed_min = s["speed_min"].get<double>();
  c.synth.speed_max = s["speed_max"].get<double>();
  c.synth.ego_length = s["ego_length"].get<double>();
  c.synth.ego_width = s["ego_width"].get<double>();
  c.synth.global_transform = s["global_transform"].get<bool>();
  const auto & t = s["three_point_turn"];
  c.synth.three_point_turn.radius = t["radius"].get<double>();
  c.synth.three_point_turn.arcs_deg = t["arcs_deg"].get<std::array<double, 3>>();
  c.synth.three_point_turn.speed = t["speed"].get<double>();
  c.synth.three_point_turn.pause_s = t["pause_s"].get<double>();

  if (c.metrics.w_lon <= 0.0) {config_fail("metrics.w_lon", "must be positive");}
  if (c.metrics.grounding_gate <= 0.0) {config_fail("metrics.grounding_gate", "must be positive");}
  if (c.distractor_ratio < 0.0) {config_fail("qa.distractor_ratio", "must be non-negative");}
  if (c.interaction.t_c <= 0.0) {config_fail("interaction.t_c", "must be positive");}
  if (c.interaction.max_gap_frames < 0) {
    config_fail("interaction.max_gap_frames", "must be non-negative");
  }
  if (c.relations.k_lat < 0 || c.relations.k_lon < 0) {
    config_fail("relations", "hop limits must be non-negative");
  }
  if (c.planner_config.target_speed && *c.planner_config.target_speed < 0.0) {
    config_fail("planner.target_speed", "must be non-negative");
  }
  validate_synth_params(c.synth);
  return c;
}

}  // namespace

QAConfig ToolkitConfig::qa_config() const
{
  QAConfig q;
  q.seed = seed;
  q.perception_distractors = perception_distractors;
  q.distractor_ratio = distractor_ratio;
  q.interaction = interaction;
  return q;
}

PlannerConfig ToolkitConfig::effective_planner_config() const
{
  PlannerConfig p = planner_config;
  p.lane = relations.lane;
  return p;
}

std::string config_to_json(const ToolkitConfig & config)
{
  return to_json(config).dump(2);
}

ToolkitConfig merge_config_json(const ToolkitConfig & base, std::string_view document)
{
  Json layer;
  try {
    layer = Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error & e) {
    fail(ErrorCode::kConfigError, std::string("config: ") + e.what());
  }
  Json full = to_json(base);
  check_layer(layer, full, "");
  overlay(full, layer);
  return from_json(full);
}

ToolkitConfig config_set(const ToolkitConfig & base, std::string_view key, std::string_view value)
{
  if (key.empty()) {
    fail(ErrorCode::kConfigError, "config: empty key");
  }
  Json leaf;
  try {
    leaf = Json::parse(value.begin(), value.end());
  } catch (const Json::parse_error &) {
    leaf = std::string(value);
  }
  Json layer = Json::object();
  Json * node = &layer;
  std::string_view rest = key;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (part.empty()) {
      fail(ErrorCode::kConfigError, "config: malformed key '" + std::string(key) + "'");
    }
    if (dot == std::string_view::npos) {
      (*node)[part] = leaf;
      break;
    }
    node = &(*node)[part];
    rest.remove_prefix(dot + 1);
  }
  return merge_config_json(base, layer.dump());
}

}  // namespace drivelab
