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

#include "drivelab/interaction.hpp"

#include "drivelab/error.hpp"
#include "drivelab/geometry.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace drivelab
{

namespace
{

constexpr std::array<std::string_view, 5> kKindNames = {
  "BYPASS_CONES", "YIELD_TO_PEDESTRIAN", "YIELD_TO_VEHICLE", "OVERTAKE_STRADDLE",
  "OVERTAKE_LANE_CHANGE"};
constexpr std::array<std::string_view, 2> kSideNames = {"LEFT", "RIGHT"};
constexpr std::array<std::string_view, 3> kReasonNames = {
  "HAS_INTERACTION", "IN_EGO_CORRIDOR", "NONE"};

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::string_view, N> & names, std::string_view name,
  std::string_view what)
{
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) {
      return static_cast<Enum>(i);
    }
  }
  fail(ErrorCode::kSchemaError, "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 &&
         d3 != 0.0 && d4 != 0.0;
}

double segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
  if (segments_intersect(p1, p2, q1, q2)) {
    return 0.0;
  }
  return std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
      point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
}

OrientedBox footprint(const AgentState & s)
{
  return {s.pose.position(), s.pose.heading, s.length, s.width};
}

struct ModeRun
{
  LaneMode mode;
  std::size_t first;
  std::size_t last;
  bool connected_to_previous;
};

/// Collapses per-frame modes into runs, skipping short NOTON/invalid gaps.
std::vector<ModeRun> mode_runs(std::span<const LaneMode> modes, const AgentTrack & agent,
  int max_gap)
{
  std::vector<ModeRun> runs;
  std::size_t gap = 0;
  bool broken = true;
  for (std::size_t f = 0; f < modes.size(); ++f) {
    const bool known = agent.states[f].valid && modes[f] != LaneMode::kNoton;
    if (!known) {
      ++gap;
      if (gap > static_cast<std::size_t>(max_gap)) {
        broken = true;
      }
      continue;
    }
    if (!runs.empty() && !broken && runs.back().mode == modes[f]) {
      runs.back().last = f;
    } else {
      runs.push_back({modes[f], f, f, !broken && !runs.empty()});
    }
    gap = 0;
    broken = false;
  }
  return runs;
}

double mean_abs_speed(const AgentTrack & track, std::size_t first, std::size_t last)
{
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = first; f <= last; ++f) {
    if (track.states[f].valid) {
      sum += std::abs(track.states[f].speed);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::optional<HomotopyClass> pass_homotopy(const Scene & scene, const AgentTrack & agent,
  std::size_t first, std::size_t last)
{
  std::vector<Vec2> ego;
  std::vector<Vec2> other;
  for (std::size_t f = first; f <= last; ++f) {
    if (agent.states[f].valid) {
      ego.push_back(scene.ego.states[f].pose.position());
      other.push_back(agent.states[f].pose.position());
    }
  }
  try {
    return classify_homotopy(ego, other).cls;
  } catch (const Error &) {
    return std::nullopt;
  }
}

InteractionKind overtake_kind(std::span<const EgoLaneDecision> decisions, std::size_t first,
  std::size_t last)
{
  std::optional<std::size_t> first_change;
  std::optional<std::size_t> closing_change;
  for (std::size_t f = first; f <= last; ++f) {
    const auto d = decisions[f];
    if (d != EgoLaneDecision::kLeftLaneChange && d != EgoLaneDecision::kRightLaneChange) {
      continue;
    }
    if (!first_change) {
      first_change = f;
    } else if (d != decisions[*first_change]) {
      closing_change = f;
    }
  }
  if (first_change && closing_change) {
    for (std::size_t f = *first_change + 1; f < *closing_change; ++f) {
      if (decisions[f] == EgoLaneDecision::kKeepLane) {
        return InteractionKind::kOvertakeLaneChange;
      }
    }
  }
  return InteractionKind::kOvertakeStraddle;
}

void label_passes(const Scene & scene, const SceneRelations & rel, std::size_t agent_index,
  const InteractionConfig & config, std::vector<InteractionLabel> & out)
{
  const auto & agent = scene.agents[agent_index];
  const bool cone = agent.category == Category::kTrafficCone ||
    agent.category == Category::kBarrier;
  if (!cone && !is_vehicle(agent.category)) {
    return;
  }
  const auto runs = mode_runs(rel.lane_modes[agent_index], agent, config.max_gap_frames);
  for (std::size_t i = 0; i + 2 < runs.size(); ++i) {
    const auto & ahead = runs[i];
    const auto & beside = runs[i + 1];
    const auto & behind = runs[i + 2];
    if (ahead.mode != LaneMode::kAhead || behind.mode != LaneMode::kBehind ||
      (beside.mode != LaneMode::kLeft && beside.mode != LaneMode::kRight) ||
      !beside.connected_to_previous || !behind.connected_to_previous)
    {
      continue;
    }
    const std::size_t start = ahead.last;
    const std::size_t end = behind.first;
    if (mean_abs_speed(agent, start, end) >= mean_abs_speed(scene.ego, start, end)) {
      continue;
    }
    const PassSide side = beside.mode == LaneMode::kLeft ? PassSide::kLeft : PassSide::kRight;
    // The object must sweep around the ego in the matching sense: left => CCW.
    const auto cls = pass_homotopy(scene, agent, ahead.first, behind.last);
    const auto expected = side == PassSide::kLeft ? HomotopyClass::kCounterClockwise :
      HomotopyClass::kClockwise;
    if (cls != expected) {
      continue;
    }
    InteractionLabel label;
    label.agent_id = agent.id;
    label.side = side;
    label.start = start;
    label.end = end;
    label.kind = cone ? InteractionKind::kBypassCones :
      overtake_kind(rel.ego_decisions, start, end);
    out.push_back(label);
  }
}

std::vector<Vec2> path_by_distance(const Scene & scene, std::size_t frame, double lookahead)
{
  std::vector<Vec2> path{scene.ego.states[frame].pose.position()};
  double travelled = 0.0;
  for (std::size_t f = frame + 1; f < scene.frame_count() && travelled < lookahead; ++f) {
    const Vec2 p = scene.ego.states[f].pose.position();
    travelled += norm(p - path.back());
    path.push_back(p);
  }
  return path;
}

bool blocks_ego(const Scene & scene, const AgentState & agent, std::size_t frame,
  const InteractionConfig & config)
{
  if (!agent.valid) {
    return false;
  }
  const auto & ego = scene.ego.states[frame];
  if (to_local(ego.pose, agent.pose.position()).x <= 0.0) {
    return false;
  }
  const auto path = path_by_distance(scene, frame, config.yield_lookahead);
  return footprint_near_path(agent, path, 0.5 * ego.width + config.corridor_margin);
}

void label_yields(const Scene & scene, const InteractionConfig & config,
  std::vector<InteractionLabel> & out)
{
  const auto & ego = scene.ego.states;
  const std::size_t n = ego.size();
  std::size_t f = 1;
  while (f < n) {
    if (std::abs(ego[f].speed) >= config.v_stop || std::abs(ego[f - 1].speed) < config.v_stop) {
      ++f;
      continue;
    }
    std::size_t last = f;
    while (last + 1 < n && std::abs(ego[last + 1].speed) < config.v_stop) {
      ++last;
    }
    if (last + 1 >= n) {
      break;  // never resumes
    }
    for (const auto & agent : scene.agents) {
      InteractionKind kind;
      if (agent.category == Category::kPedestrian) {
        kind = InteractionKind::kYieldToPedestrian;
      } else if (is_vehicle(agent.category)) {
        kind = InteractionKind::kYieldToVehicle;
      } else {
        continue;
      }
      bool blocked = false;
      for (std::size_t g = f; g <= last && !blocked; ++g) {
        blocked = blocks_ego(scene, agent.states[g], g, config);
      }
      if (blocked && !blocks_ego(scene, agent.states[last + 1], last + 1, config)) {
        out.push_back({agent.id, kind, std::nullopt, f, last});
      }
    }
    f = last + 1;
  }
}

}  // namespace

std::string_view to_string(InteractionKind value) { return kKindNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(PassSide value) { return kSideNames[static_cast<std::size_t>(value)]; }
std::string_view to_string(CriticalReason value) { return kReasonNames[static_cast<std::size_t>(value)]; }

InteractionKind parse_interaction_kind(std::string_view name)
{
  return lookup<InteractionKind>(kKindNames, name, "interaction kind");
}
PassSide parse_pass_side(std::string_view name)
{
  return lookup<PassSide>(kSideNames, name, "side");
}
CriticalReason parse_critical_reason(std::string_view name)
{
  return lookup<CriticalReason>(kReasonNames, name, "critical reason");
}

void sort_labels(std::vector<InteractionLabel> & labels)
{
  std::sort(labels.begin(), labels.end(), [](const auto & a, const auto & b) {
      return std::tie(a.agent_id, a.start, a.kind, a.end) <
             std::tie(b.agent_id, b.start, b.kind, b.end);
    });
}

std::vector<InteractionLabel> label_interactions(const Scene & scene,
  const SceneRelations & relations, const InteractionConfig & config)
{
  std::vector<InteractionLabel> out;
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    label_passes(scene, relations, a, config, out);
  }
  label_yields(scene, config, out);
  sort_labels(out);
  return out;
}

std::vector<Vec2> ego_future_path(const Scene & scene, std::size_t frame, double horizon_s)
{
  const auto steps = static_cast<std::size_t>(std::llround(horizon_s * scene.frame_rate_hz));
  std::vector<Vec2> path;
  for (std::size_t f = frame; f <= frame + steps && f < scene.frame_count(); ++f) {
    path.push_back(scene.ego.states[f].pose.position());
  }
  return path;
}

bool footprint_near_path(const AgentState & agent, std::span<const Vec2> path, double dilation)
{
  if (path.empty()) {
    return false;
  }
  const auto box = footprint(agent);
  for (const auto & p : path) {
    if (box.contains(p)) {
      return true;
    }
  }
  const auto c = box.corners();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < 4; ++e) {
    const Vec2 a = c[e];
    const Vec2 b = c[(e + 1) % 4];
    if (path.size() == 1) {
      best = std::min(best, point_segment_distance(path[0], a, b));
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      best = std::min(best, segment_distance(a, b, path[k], path[k + 1]));
    }
  }
  return best <= dilation;
}

std::vector<Criticality> critical_objects(const Scene & scene,
  std::span<const InteractionLabel> labels, std::size_t frame, const InteractionConfig & config)
{
  if (frame >= scene.frame_count()) {
    fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(frame) + " out of range");
  }
  const auto path = ego_future_path(scene, frame, config.t_c);
  const double dilation = 0.5 * scene.ego.states[frame].width + config.corridor_margin;
  std::vector<Criticality> out;
  for (const auto & agent : scene.agents) {
    const auto & state = agent.states[frame];
    if (!state.valid) {
      continue;
    }
    Criticality c{agent.id, false, CriticalReason::kNone};
    const bool labelled = std::any_of(labels.begin(), labels.end(), [&](const auto & l) {
          return l.agent_id == agent.id && l.covers(frame);
        });
    if (labelled) {
      c = {agent.id, true, CriticalReason::kHasInteraction};
    } else if (footprint_near_path(state, path, dilation)) {
      c = {agent.id, true, CriticalReason::kInEgoCorridor};
    }
    out.push_back(c);
  }
  return out;
}

std::vector<InteractionLabel> merge_overrides(std::vector<InteractionLabel> heuristic,
  const std::string & scene_id, std::span<const LabelOverride> overrides)
{
  for (const auto & o : overrides) {
    if (o.scene_id != scene_id) {
      continue;
    }
    std::erase_if(heuristic, [&](const InteractionLabel & h) {
        return h.agent_id == o.label.agent_id && h.kind == o.label.kind &&
               h.start <= o.label.end && o.label.start <= h.end;
      });
  }
  for (const auto & o : overrides) {
    if (o.scene_id == scene_id && !o.reject) {
      heuristic.push_back(o.label);
    }
  }
  sort_labels(heuristic);
  return heuristic;
}

std::vector<LabelOverride> parse_label_sidecar(std::string_view document)
{
  using json_util::field;
  const auto doc = json_util::parse(document, "sidecar");
  json_util::require_array(doc, "sidecar");
  std::vector<LabelOverride> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string at = "sidecar[" + std::to_string(i) + "]";
    const auto & e = doc[i];
    json_util::require_object(e, at);
    json_util::only_keys(e, {"scene_id", "agent_id", "kind", "side", "start", "end", "reject"}, at);
    LabelOverride o;
    o.scene_id = json_util::get_string(field(e, "scene_id", at), at + ".scene_id");
    o.label.agent_id = json_util::get_string(field(e, "agent_id", at), at + ".agent_id");
    o.label.kind = parse_interaction_kind(json_util::get_string(field(e, "kind", at), at + ".kind"));
    if (const auto it = e.find("side"); it != e.end() && !it->is_null()) {
      o.label.side = parse_pass_side(json_util::get_string(*it, at + ".side"));
    }
    const auto read_frame = [&](const char * key) {
        const auto & v = field(e, key, at);
        if (!v.is_number_unsigned()) {
          fail(ErrorCode::kSchemaError, at + "." + key + ": expected a frame index");
        }
        return v.get<std::size_t>();
      };
    o.label.start = read_frame("start");
    o.label.end = read_frame("end");
    if (o.label.end < o.label.start) {
      fail(ErrorCode::kSchemaError, at + ": end precedes start");
    }
    const bool needs_side = o.label.kind == InteractionKind::kBypassCones ||
      o.label.kind == InteractionKind::kOvertakeLaneChange ||
      o.label.kind == InteractionKind::kOvertakeStraddle;
    if (needs_side && !o.label.side) {
      fail(ErrorCode::kSchemaError, at + ": bypass and overtake labels need a side");
    }
    if (const auto it = e.find("reject"); it != e.end()) {
      o.reject = json_util::get_bool(*it, at + ".reject");
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace drivelab
