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
#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace drivelab
{

namespace
{

using json_util::Json;
using json_util::canonical_real;
using json_util::field;
using json_util::get_real;
using json_util::get_string;

Vec2 read_point(const Json & value, const std::string & where)
{
  if (!value.is_array() || value.size() != 2) {
    fail(ErrorCode::kSchemaError, where + ": expected [x, y]");
  }
  return {get_real(value[0], where + "[0]"), get_real(value[1], where + "[1]")};
}

std::optional<std::string> read_optional_id(const Json & value, const std::string & where)
{
  if (value.is_null()) {
    return std::nullopt;
  }
  return get_string(value, where);
}

std::vector<std::string> read_ids(const Json & value, const std::string & where)
{
  json_util::require_array(value, where);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < value.size(); ++i) {
    ids.push_back(get_string(value[i], where + "[" + std::to_string(i) + "]"));
  }
  return ids;
}

Lane read_lane(const Json & value, const std::string & where)
{
  json_util::require_object(value, where);
  json_util::only_keys(value, {"id", "centerline", "half_width", "left_neighbor",
      "right_neighbor", "successors", "predecessors", "semantic"}, where);
  Lane lane;
  lane.id = get_string(field(value, "id", where), where + ".id");
  const auto & line = field(value, "centerline", where);
  json_util::require_array(line, where + ".centerline");
  for (std::size_t k = 0; k < line.size(); ++k) {
    lane.centerline.push_back(read_point(line[k], where + ".centerline[" + std::to_string(k) + "]"));
  }
  lane.half_width = get_real(field(value, "half_width", where), where + ".half_width");
  lane.left_neighbor = read_optional_id(field(value, "left_neighbor", where), where + ".left_neighbor");
  lane.right_neighbor =
    read_optional_id(field(value, "right_neighbor", where), where + ".right_neighbor");
  lane.successors = read_ids(field(value, "successors", where), where + ".successors");
  lane.predecessors = read_ids(field(value, "predecessors", where), where + ".predecessors");
  lane.semantic = parse_lane_semantic(get_string(field(value, "semantic", where), where + ".semantic"));
  return lane;
}

AgentState read_state(const Json & value, const std::string & where)
{
  json_util::require_object(value, where);
  json_util::only_keys(value, {"x", "y", "heading", "speed", "length", "width", "valid"}, where);
  AgentState s;
  s.pose.x = get_real(field(value, "x", where), where + ".x");
  s.pose.y = get_real(field(value, "y", where), where + ".y");
  s.pose.heading = wrap_angle(get_real(field(value, "heading", where), where + ".heading"));
  s.speed = get_real(field(value, "speed", where), where + ".speed");
  s.length = get_real(field(value, "length", where), where + ".length");
  s.width = get_real(field(value, "width", where), where + ".width");
  s.valid = json_util::get_bool(field(value, "valid", where), where + ".valid");
  return s;
}

AgentTrack read_track(const Json & value, const std::string & where)
{
  json_util::require_object(value, where);
  json_util::only_keys(value, {"id", "category", "states"}, where);
  AgentTrack track;
  track.id = get_string(field(value, "id", where), where + ".id");
  track.category = parse_category(get_string(field(value, "category", where), where + ".category"));
  const auto & states = field(value, "states", where);
  json_util::require_array(states, where + ".states");
  track.states.reserve(states.size());
  for (std::size_t f = 0; f < states.size(); ++f) {
    track.states.push_back(read_state(states[f], where + ".states[" + std::to_string(f) + "]"));
  }
  return track;
}

Json write_point(Vec2 p) { return Json::array({canonical_real(p.x), canonical_real(p.y)}); }

Json write_track(const AgentTrack & track)
{
  Json states = Json::array();
  for (const auto & s : track.states) {
    states.push_back({
        {"x", canonical_real(s.pose.x)},
        {"y", canonical_real(s.pose.y)},
        {"heading", canonical_real(s.pose.heading)},
        {"speed", canonical_real(s.speed)},
        {"length", canonical_real(s.length)},
        {"width", canonical_real(s.width)},
        {"valid", s.valid},
      });
  }
  return {{"id", track.id}, {"category", std::string(to_string(track.category))},
    {"states", std::move(states)}};
}

}  // namespace

Scene load_scene(std::string_view document)
{
  const Json doc = json_util::parse(document, "scene");
  json_util::require_object(doc, "scene");
  json_util::only_keys(doc, {"id", "frame_rate_hz", "lanes", "agents", "ego", "nav_commands",
      "scenario_tag"}, "scene");

  Scene scene;
  scene.id = get_string(field(doc, "id", "scene"), "id");
  scene.frame_rate_hz = get_real(field(doc, "frame_rate_hz", "scene"), "frame_rate_hz");

  const auto & lanes = field(doc, "lanes", "scene");
  json_util::require_array(lanes, "lanes");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    scene.lanes.push_back(read_lane(lanes[i], "lanes[" + std::to_string(i) + "]"));
  }
  const auto & agents = field(doc, "agents", "scene");
  json_util::require_array(agents, "agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    scene.agents.push_back(read_track(agents[i], "agents[" + std::to_string(i) + "]"));
  }
  scene.ego = read_track(field(doc, "ego", "scene"), "ego");

  const auto & nav = field(doc, "nav_commands", "scene");
  json_util::require_array(nav, "nav_commands");
  for (std::size_t i = 0; i < nav.size(); ++i) {
    scene.nav_commands.push_back(
      parse_nav_command(get_string(nav[i], "nav_commands[" + std::to_string(i) + "]")));
  }
  if (const auto it = doc.find("scenario_tag"); it != doc.end() && !it->is_null()) {
    scene.scenario_tag = parse_scenario_tag(get_string(*it, "scenario_tag"));
  }
  validate_scene(scene);
  return scene;
}

Scene load_scene_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::kIoError, path + ": cannot open");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return load_scene(buffer.str());
  } catch (const Error & e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string save_scene(const Scene & scene)
{
  validate_scene(scene);
  Json lanes = Json::array();
  for (const auto & lane : scene.lanes) {
    Json line = Json::array();
    for (const auto & p : lane.centerline) {
      line.push_back(write_point(p));
    }
    lanes.push_back({
        {"id", lane.id},
        {"centerline", std::move(line)},
        {"half_width", canonical_real(lane.half_width)},
        {"left_neighbor", lane.left_neighbor ? Json(*lane.left_neighbor) : Json(nullptr)},
        {"right_neighbor", lane.right_neighbor ? Json(*lane.right_neighbor) : Json(nullptr)},
        {"successors", lane.successors},
        {"predecessors", lane.predecessors},
        {"semantic", std::string(to_string(lane.semantic))},
      });
  }
  Json agents = Json::array();
  for (const auto & agent : scene.agents) {
    agents.push_back(write_track(agent));
  }
  Json nav = Json::array();
  for (const auto c : scene.nav_commands) {
    nav.push_back(std::string(to_string(c)));
  }
  const Json doc = {
    {"id", scene.id},
    {"frame_rate_hz", canonical_real(scene.frame_rate_hz)},
    {"lanes", std::move(lanes)},
    {"agents", std::move(agents)},
    {"ego", write_track(scene.ego)},
    {"nav_commands", std::move(nav)},
    {"scenario_tag",
      scene.scenario_tag ? Json(std::string(to_string(*scene.scenario_tag))) : Json(nullptr)},
  };
  return doc.dump(2) + "\n";
}

}  // namespace drivelab
