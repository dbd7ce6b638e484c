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

#include "drivelab/relations.hpp"

#include "drivelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <set>

namespace drivelab
{

namespace
{

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Winding increments are accumulated in fixed point so that splitting a sequence and
// re-adding the parts reproduces the whole exactly.
constexpr double kWindingQuantum = 0x1p-40;

enum class Side { kLeft, kRight };

Side flip(Side side) { return side == Side::kLeft ? Side::kRight : Side::kLeft; }

std::optional<std::size_t> neighbor(const LaneMap & map, std::size_t lane, Side side)
{
  return side == Side::kLeft ? map.left(lane) : map.right(lane);
}

/// Walks up to `hops` neighbour links from `start`. Entering a lane whose same-side link points
/// back means it runs the opposite way, so the walk continues on its other side.
bool lateral_reaches(const LaneMap & map, std::size_t start, Side side, int hops,
  std::size_t target)
{
  std::set<std::size_t> visited{start};
  std::size_t current = start;
  Side direction = side;
  for (int hop = 0; hop < hops; ++hop) {
    const auto next = neighbor(map, current, direction);
    if (!next) {
      return false;
    }
    if (!visited.insert(*next).second) {
      fail(ErrorCode::kTopologyCycle,
        "neighbour walk from lane '" + map.lane(start).id + "' revisits lane '" +
        map.lane(*next).id + "'");
    }
    if (*next == target) {
      return true;
    }
    if (neighbor(map, *next, direction) == current) {
      direction = flip(direction);
    }
    current = *next;
  }
  return false;
}

/// Lanes on the ego lane's successor/predecessor chains within `hops`, mapped to the
/// station of their start point in ego-lane arc length.
std::map<std::size_t, double> longitudinal_chain(const LaneMap & map, std::size_t ego_lane,
  int hops)
{
  std::map<std::size_t, double> offset{{ego_lane, 0.0}};
  std::deque<std::pair<std::size_t, int>> queue{{ego_lane, 0}};
  while (!queue.empty()) {
    const auto [lane, depth] = queue.front();
    queue.pop_front();
    if (depth >= hops) {
      continue;
    }
    const double base = offset.at(lane);
    for (const auto next : map.successors(lane)) {
      if (offset.emplace(next, base + map.polyline(lane).length()).second) {
        queue.emplace_back(next, depth + 1);
      }
    }
    for (const auto prev : map.predecessors(lane)) {
      if (offset.emplace(prev, base - map.polyline(prev).length()).second) {
        queue.emplace_back(prev, depth + 1);
      }
    }
  }
  return offset;
}

}  // namespace

std::string_view to_string(LaneMode value)
{
  constexpr std::array<std::string_view, 5> names = {"LEFT", "RIGHT", "AHEAD", "BEHIND", "NOTON"};
  return names[static_cast<std::size_t>(value)];
}

std::string_view to_string(HomotopyClass value)
{
  constexpr std::array<std::string_view, 3> names = {"S", "CW", "CCW"};
  return names[static_cast<std::size_t>(value)];
}

std::string_view to_string(EgoLaneDecision value)
{
  constexpr std::array<std::string_view, 4> names = {
    "KEEP_LANE", "LEFT_LANE_CHANGE", "RIGHT_LANE_CHANGE", "STRADDLE"};
  return names[static_cast<std::size_t>(value)];
}

LaneMode parse_lane_mode(std::string_view name)
{
  for (int i = 0; i < 5; ++i) {
    if (to_string(static_cast<LaneMode>(i)) == name) {
      return static_cast<LaneMode>(i);
    }
  }
  fail(ErrorCode::kSchemaError, "unknown lane mode '" + std::string(name) + "'");
}

EgoLaneDecision parse_ego_lane_decision(std::string_view name)
{
  for (int i = 0; i < 4; ++i) {
    if (to_string(static_cast<EgoLaneDecision>(i)) == name) {
      return static_cast<EgoLaneDecision>(i);
    }
  }
  fail(ErrorCode::kSchemaError, "unknown lane decision '" + std::string(name) + "'");
}

LaneMode agent_ego_lane_mode(std::optional<std::size_t> agent_lane,
  std::optional<std::size_t> ego_lane, const LaneMap & topology, double agent_s, double ego_s,
  bool ego_reversed, const RelationsConfig & config)
{
  if (!agent_lane || !ego_lane) {
    return LaneMode::kNoton;
  }
  const auto chain = longitudinal_chain(topology, *ego_lane, config.k_lon);

  if (*agent_lane != *ego_lane) {
    for (const auto & [lane, offset] : chain) {
      (void)offset;
      if (lateral_reaches(topology, lane, Side::kLeft, config.k_lat, *agent_lane)) {
        return ego_reversed ? LaneMode::kRight : LaneMode::kLeft;
      }
      if (lateral_reaches(topology, lane, Side::kRight, config.k_lat, *agent_lane)) {
        return ego_reversed ? LaneMode::kLeft : LaneMode::kRight;
      }
    }
  }

  const auto it = chain.find(*agent_lane);
  if (it == chain.end()) {
    return LaneMode::kNoton;
  }
  double delta = it->second + agent_s - ego_s;
  if (ego_reversed) {
    delta = -delta;
  }
  if (std::abs(delta) < config.eps_lon) {
    return LaneMode::kAhead;
  }
  return delta > 0.0 ? LaneMode::kAhead : LaneMode::kBehind;
}

Homotopy classify_homotopy(std::span<const Vec2> a, std::span<const Vec2> b, double theta_s,
  double eps_rel)
{
  if (a.size() != b.size() || a.size() < 2) {
    fail(ErrorCode::kLengthError, "homotopy needs two equal-length sequences of >= 2 frames");
  }
  std::vector<Vec2> rel(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    rel[t] = b[t] - a[t];
    if (norm(rel[t]) < eps_rel) {
      fail(ErrorCode::kDegenerate, "agents coincide at frame " + std::to_string(t));
    }
  }
  std::int64_t units = 0;
  for (std::size_t t = 0; t + 1 < rel.size(); ++t) {
    // Signed angle between consecutive relative vectors, i.e. wrap(theta[t+1] - theta[t]).
    const double step = std::atan2(cross(rel[t], rel[t + 1]), dot(rel[t], rel[t + 1]));
    units += std::llround(step / kWindingQuantum);
  }
  Homotopy h;
  h.winding = static_cast<double>(units) * kWindingQuantum;
  if (std::abs(h.winding) < theta_s) {
    h.cls = HomotopyClass::kStatic;
  } else {
    h.cls = h.winding > 0.0 ? HomotopyClass::kCounterClockwise : HomotopyClass::kClockwise;
  }
  return h;
}

std::vector<std::optional<LaneMatch>> ego_lane_matches(
  const Scene & scene, const LaneMap & lanes, const RelationsConfig & config)
{
  std::vector<std::optional<LaneMatch>> matches(scene.frame_count());
  if (lanes.size() == 0) {
    return matches;
  }
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    matches[f] = lane_association(scene.ego.states[f].pose, scene.ego.category, lanes, config.lane);
  }
  return matches;
}

std::vector<EgoLaneDecision> ego_lane_decisions(const Scene & scene, const RelationsConfig & config)
{
  const LaneMap lanes(scene.lanes);
  const auto matches = ego_lane_matches(scene, lanes, config);
  return ego_lane_decisions(scene, lanes, matches, config);
}

std::vector<EgoLaneDecision> ego_lane_decisions(const Scene & scene, const LaneMap & lanes,
  std::span<const std::optional<LaneMatch>> ego_matches, const RelationsConfig & config)
{
  (void)config;
  std::vector<EgoLaneDecision> out(scene.frame_count(), EgoLaneDecision::kKeepLane);
  std::optional<LaneMatch> last;
  for (std::size_t f = 0; f < scene.frame_count(); ++f) {
    const auto & match = ego_matches[f];
    if (!match) {
      continue;
    }
    if (last && last->lane_index != match->lane_index) {
      std::optional<Side> side;
      if (lanes.left(last->lane_index) == match->lane_index) {
        side = Side::kLeft;
      } else if (lanes.right(last->lane_index) == match->lane_index) {
        side = Side::kRight;
      }
      if (side) {
        // The lane's left is the ego's right while travelling against it.
        const Side ego_side = last->reversed ? flip(*side) : *side;
        out[f] = ego_side == Side::kLeft ? EgoLaneDecision::kLeftLaneChange :
          EgoLaneDecision::kRightLaneChange;
        last = match;
        continue;
      }
    }
    const double limit = lanes.lane(match->lane_index).half_width - 0.5 * scene.ego.states[f].width;
    if (std::abs(match->frenet.d) > limit) {
      out[f] = EgoLaneDecision::kStraddle;
    }
    last = match;
  }
  return out;
}

std::vector<NavCommand> label_nav_commands(const Scene & scene, const RelationsConfig & config)
{
  const std::size_t n = scene.frame_count();
  std::vector<NavCommand> out(n, NavCommand::kKeepForward);
  if (n < 2) {
    return out;
  }
  const auto & states = scene.ego.states;
  const double dt = scene.dt();

  std::vector<double> unwrapped(n, states[0].pose.heading);
  std::vector<double> travelled(n, 0.0);
  std::vector<bool> turning(n - 1, false);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double dh = wrap_angle(states[t + 1].pose.heading - states[t].pose.heading);
    unwrapped[t + 1] = unwrapped[t] + dh;
    travelled[t + 1] = travelled[t] +
      norm(states[t + 1].pose.position() - states[t].pose.position());
    turning[t] = std::abs(dh) > config.yaw_rate_min * dt;
  }

  // Maneuvers are runs of turning steps; runs separated by little travel are merged.
  struct Maneuver { std::size_t first_step; std::size_t last_step; };
  std::vector<Maneuver> maneuvers;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    if (!turning[t]) {
      continue;
    }
    if (!maneuvers.empty() && (maneuvers.back().last_step + 1 == t ||
      travelled[t] - travelled[maneuvers.back().last_step + 1] < config.merge_distance))
    {
      maneuvers.back().last_step = t;
    } else {
      maneuvers.push_back({t, t});
    }
  }

  const LaneMap lanes(scene.lanes);
  auto in_intersection = [&](std::size_t f) {
      for (std::size_t i = 0; i < lanes.size(); ++i) {
        if (lanes.lane(i).semantic != LaneSemantic::kIntersection) {
          continue;
        }
        const auto fr = project_to_polyline(states[f].pose.position(), lanes.polyline(i));
        if (std::abs(fr.d) <= lanes.lane(i).half_width) {
          return true;
        }
      }
      return false;
    };

  const double turn = config.turn_deg * kDegToRad;
  const double uturn = config.uturn_deg * kDegToRad;
  for (const auto & m : maneuvers) {
    const std::size_t first = m.first_step;
    const std::size_t last = m.last_step + 1;
    const double change = unwrapped[last] - unwrapped[first];
    const bool left = change > 0.0;
    bool reversal = false;
    bool intersection = false;
    for (std::size_t f = first; f <= last; ++f) {
      reversal = reversal || states[f].speed < config.v_rev;
      intersection = intersection || in_intersection(f);
    }

    std::optional<NavCommand> label;
    bool is_turn = false;
    if (std::abs(change) >= uturn) {
      if (reversal) {
        label = left ? NavCommand::kThreePointTurnLeft : NavCommand::kThreePointTurnRight;
      } else {
        label = left ? NavCommand::kUTurnLeft : NavCommand::kUTurnRight;
      }
    } else if (std::abs(change) >= turn && intersection) {
      label = left ? NavCommand::kTurnLeft : NavCommand::kTurnRight;
      is_turn = true;
    }
    if (!label) {
      continue;
    }
    for (std::size_t f = first; f <= last; ++f) {
      out[f] = *label;
    }
    if (!is_turn) {
      continue;
    }
    const NavCommand prepare = left ? NavCommand::kPrepareTurnLeft : NavCommand::kPrepareTurnRight;
    for (std::size_t f = first; f-- > 0; ) {
      const double lead_time = static_cast<double>(first - f) * dt;
      if (lead_time > config.window_s || travelled[first] - travelled[f] >= config.d_prep ||
        out[f] != NavCommand::kKeepForward)
      {
        break;
      }
      out[f] = prepare;
    }
  }
  return out;
}

SceneRelations compute_relations(const Scene & scene, const RelationsConfig & config)
{
  const LaneMap lanes(scene.lanes);
  SceneRelations rel;
  const std::size_t n = scene.frame_count();
  rel.ego_lanes = ego_lane_matches(scene, lanes, config);
  rel.ego_decisions = ego_lane_decisions(scene, lanes, rel.ego_lanes, config);
  rel.nav_commands = label_nav_commands(scene, config);

  rel.agent_lanes.resize(scene.agents.size());
  rel.lane_modes.resize(scene.agents.size());
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    const auto & agent = scene.agents[a];
    rel.agent_lanes[a].resize(n);
    rel.lane_modes[a].assign(n, LaneMode::kNoton);
    for (std::size_t f = 0; f < n; ++f) {
      const auto & state = agent.states[f];
      if (!state.valid || lanes.size() == 0) {
        continue;
      }
      rel.agent_lanes[a][f] = lane_association(state.pose, agent.category, lanes, config.lane);
      const auto & am = rel.agent_lanes[a][f];
      const auto & em = rel.ego_lanes[f];
      if (!am || !em) {
        continue;
      }
      rel.lane_modes[a][f] = agent_ego_lane_mode(am->lane_index, em->lane_index, lanes,
          am->frenet.s, em->frenet.s, em->reversed, config);
    }
  }
  return rel;
}

}  // namespace drivelab
