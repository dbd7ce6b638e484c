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

#include "drivelab/synth.hpp"

#include "drivelab/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

namespace drivelab
{

namespace
{

using json_util::Json;
constexpr double kPi = std::numbers::pi;

class Rng
{
public:
  explicit Rng(std::uint64_t seed)
  : engine_(seed) {}

  double uniform(double lo, double hi)
  {
    const double u = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
  std::mt19937_64 engine_;
};

// Motion primitive: constant acceleration on a straight line, or constant speed on an arc.
struct Phase
{
  double duration;
  double v0;
  double accel;
  double curvature;
};

struct Sample
{
  Pose2 pose;
  double speed;
};

Sample advance(Sample s, const Phase & p, double tau)
{
  const Vec2 origin = s.pose.position();
  if (p.curvature == 0.0) {
    const double dist = p.v0 * tau + 0.5 * p.accel * tau * tau;
    const Vec2 q = origin + unit_from_angle(s.pose.heading) * dist;
    return {{q.x, q.y, s.pose.heading}, p.v0 + p.accel * tau};
  }
  const double h0 = s.pose.heading;
  const double h1 = h0 + p.curvature * p.v0 * tau;
  const Vec2 q = origin + Vec2{std::sin(h1) - std::sin(h0), std::cos(h0) - std::cos(h1)} *
    (1.0 / p.curvature);
  return {{q.x, q.y, h1}, p.v0};
}

// Pose at time t; the last phase extends indefinitely.
Sample evaluate(const Pose2 & start, const std::vector<Phase> & phases, double t)
{
  Sample s{start, phases.empty() ? 0.0 : phases.front().v0};
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const bool last = i + 1 == phases.size();
    const double tau = last ? t : std::min(t, phases[i].duration);
    s = advance(s, phases[i], tau);
    t -= tau;
    if (t <= 0.0) {
      break;
    }
  }
  s.pose.heading = wrap_angle(s.pose.heading);
  return s;
}

std::vector<Phase> turn_phases(const ThreePointTurnParams & p)
{
  const double k = 1.0 / p.radius;
  const auto arc_time = [&](double deg) {return p.radius * deg * kPi / 180.0 / p.speed;};
  std::vector<Phase> out = {
    {arc_time(p.arcs_deg[0]), p.speed, 0.0, k},
    {p.pause_s, 0.0, 0.0, 0.0},
    {arc_time(p.arcs_deg[1]), -p.speed, 0.0, -k},
    {p.pause_s, 0.0, 0.0, 0.0},
    {arc_time(p.arcs_deg[2]), p.speed, 0.0, k},
  };
  std::erase_if(out, [](const Phase & ph) {return ph.duration <= 0.0;});
  return out;
}

double total_duration(const std::vector<Phase> & phases)
{
  double t = 0.0;
  for (const auto & p : phases) {t += p.duration;}
  return t;
}

// Lateral offset profile as a function of x: cosine blends between constant levels.
struct Shift
{
  double x1;
  double x2;
  double from;
  double to;
};

std::pair<double, double> lateral(const std::vector<Shift> & shifts, double x)
{
  double y = shifts.empty() ? 0.0 : shifts.front().from;
  for (const auto & s : shifts) {
    if (x <= s.x1) {
      break;
    }
    if (x >= s.x2) {
      y = s.to;
      continue;
    }
    const double u = (x - s.x1) / (s.x2 - s.x1);
    const double dy = s.to - s.from;
    return {s.from + dy * 0.5 * (1.0 - std::cos(kPi * u)),
      dy * 0.5 * kPi / (s.x2 - s.x1) * std::sin(kPi * u)};
  }
  return {y, 0.0};
}

AgentState state(const Pose2 & pose, double speed, double length, double width)
{
  return {pose, speed, length, width, true};
}

AgentTrack constant_track(std::string id, Category category, Vec2 start, double heading,
  double speed, double length, double width, std::size_t frames, double dt)
{
  AgentTrack t{std::move(id), category, {}};
  const Vec2 u = unit_from_angle(heading);
  for (std::size_t f = 0; f < frames; ++f) {
    const Vec2 p = start + u * (speed * static_cast<double>(f) * dt);
    t.states.push_back(state({p.x, p.y, wrap_angle(heading)}, speed, length, width));
  }
  return t;
}

enum class SecondLane { kLeftSameDirection, kOncoming };

// Chained straight segments covering [x_min, x_max] with the ego lane along +x at y = 0.
std::vector<Lane> make_road(double x_min, double x_max, const SynthParams & params,
  SecondLane second)
{
  const double len = params.lane_length;
  const auto first = static_cast<long>(std::floor(x_min / len));
  const auto last = static_cast<long>(std::ceil(x_max / len));
  const auto n = static_cast<std::size_t>(std::max<long>(1, last - first));
  const double half = 0.5 * params.lane_width;
  const std::string other = second == SecondLane::kOncoming ? "O" : "L";
  auto id = [](const std::string & prefix, std::size_t k) {return prefix + std::to_string(k);};

  std::vector<Lane> lanes;
  for (std::size_t k = 0; k < n; ++k) {
    const double x0 = static_cast<double>(first + static_cast<long>(k)) * len;
    const double x1 = x0 + len;
    Lane e;
    e.id = id("E", k);
    e.centerline = {{x0, 0.0}, {x1, 0.0}};
    e.half_width = half;
    e.left_neighbor = id(other, k);
    if (k + 1 < n) {e.successors.push_back(id("E", k + 1));}
    if (k > 0) {e.predecessors.push_back(id("E", k - 1));}
    lanes.push_back(e);

    Lane o;
    o.id = id(other, k);
    o.half_width = half;
    if (second == SecondLane::kOncoming) {
      o.centerline = {{x1, params.lane_width}, {x0, params.lane_width}};
      o.left_neighbor = id("E", k);
      if (k > 0) {o.successors.push_back(id(other, k - 1));}
      if (k + 1 < n) {o.predecessors.push_back(id(other, k + 1));}
    } else {
      o.centerline = {{x0, params.lane_width}, {x1, params.lane_width}};
      o.right_neighbor = id("E", k);
      if (k + 1 < n) {o.successors.push_back(id(other, k + 1));}
      if (k > 0) {o.predecessors.push_back(id(other, k - 1));}
    }
    lanes.push_back(o);
  }
  return lanes;
}

std::pair<double, double> x_extent(const Scene & scene)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto visit = [&](const AgentTrack & t) {
      for (const auto & s : t.states) {
        lo = std::min(lo, s.pose.x);
        hi = std::max(hi, s.pose.x);
      }
    };
  visit(scene.ego);
  for (const auto & a : scene.agents) {visit(a);}
  return {lo - 30.0, hi + 30.0};
}

void apply_rigid_transform(Scene & scene, Rng & rng)
{
  const double theta = rng.uniform(-kPi, kPi);
  const Vec2 shift{rng.uniform(-1000.0, 1000.0), rng.uniform(-1000.0, 1000.0)};
  const Pose2 frame{shift.x, shift.y, theta};
  for (auto & lane : scene.lanes) {
    for (auto & p : lane.centerline) {p = to_global(frame, p);}
  }
  auto move = [&](AgentTrack & t) {
      for (auto & s : t.states) {
        const Vec2 p = to_global(frame, s.pose.position());
        s.pose = {p.x, p.y, wrap_angle(s.pose.heading + theta)};
      }
    };
  move(scene.ego);
  for (auto & a : scene.agents) {move(a);}
}

double cruise_speed(Rng & rng, const SynthParams & p, double lo, double hi)
{
  const double a = std::clamp(lo, p.speed_min, p.speed_max);
  const double b = std::clamp(hi, p.speed_min, p.speed_max);
  return rng.uniform(a, std::max(a, b));
}

double duration_of(const SynthParams & p)
{
  return static_cast<double>(p.frames - 1) / p.frame_rate_hz;
}

AgentTrack shifted_ego(const SynthParams & params, double speed, const std::vector<Shift> & shifts)
{
  AgentTrack ego{"ego", Category::kCar, {}};
  const double dt = 1.0 / params.frame_rate_hz;
  for (std::size_t f = 0; f < params.frames; ++f) {
    const double x = speed * static_cast<double>(f) * dt;
    const auto [y, slope] = lateral(shifts, x);
    ego.states.push_back(state({x, y, std::atan(slope)}, speed * std::hypot(1.0, slope),
      params.ego_length, params.ego_width));
  }
  return ego;
}

void build_nominal(Scene & scene, Rng & rng, const SynthParams & p)
{
  const double dt = 1.0 / p.frame_rate_hz;
  const double v = cruise_speed(rng, p, p.speed_min, p.speed_max);
  scene.ego = constant_track("ego", Category::kCar, {0.0, 0.0}, 0.0, v, p.ego_length,
      p.ego_width, p.frames, dt);
  const double gap = rng.uniform(15.0, 30.0);
  const double offset = rng.uniform(-10.0, 10.0);
  scene.agents.push_back(constant_track("car_0", Category::kCar, {gap, 0.0}, 0.0, v,
      rng.uniform(4.2, 4.9), rng.uniform(1.8, 2.0), p.frames, dt));
  scene.agents.push_back(constant_track("car_1", Category::kCar, {offset, p.lane_width}, 0.0, v,
      rng.uniform(4.2, 4.9), rng.uniform(1.8, 2.0), p.frames, dt));
  const auto [lo, hi] = x_extent(scene);
  scene.lanes = make_road(lo, hi, p, SecondLane::kLeftSameDirection);
}

void build_three_point_turn(Scene & scene, Rng & rng, const SynthParams & p)
{
  const auto & tp = p.three_point_turn;
  const double dt = 1.0 / p.frame_rate_hz;
  const double approach = rng.uniform(2.0, 4.0);
  const auto turn = turn_phases(tp);
  const double t_turn = total_duration(turn);
  if (approach + t_turn + 1.0 > duration_of(p)) {
    fail(ErrorCode::kParamError, "three-point turn does not fit in the scene duration");
  }
  std::vector<Phase> phases{{approach, tp.speed, 0.0, 0.0}};
  phases.insert(phases.end(), turn.begin(), turn.end());
  const double exit_speed = std::max(tp.speed, cruise_speed(rng, p, 4.0, 6.0));
  phases.push_back({(exit_speed - tp.speed) / 1.5, tp.speed, 1.5, 0.0});
  phases.push_back({0.0, exit_speed, 0.0, 0.0});

  const Pose2 start{0.0, rng.uniform(-0.3, 0.3), 0.0};
  scene.ego = {"ego", Category::kCar, {}};
  for (std::size_t f = 0; f < p.frames; ++f) {
    const double t = static_cast<double>(f) * dt;
    const auto s = evaluate(start, phases, t);
    scene.ego.states.push_back(state(s.pose, s.speed, p.ego_length, p.ego_width));
    const bool turning = t >= approach - 1e-9 && t <= approach + t_turn + 1e-9;
    scene.nav_commands.push_back(turning ? NavCommand::kThreePointTurnLeft :
      NavCommand::kKeepForward);
  }
  const auto [lo, hi] = x_extent(scene);
  scene.lanes = make_road(lo, hi, p, SecondLane::kOncoming);
}

void build_resume_from_stop(Scene & scene, Rng & rng, const SynthParams & p, bool crossing_car)
{
  const double dt = 1.0 / p.frame_rate_hz;
  const double v0 = cruise_speed(rng, p, 5.0, 10.0);
  const double brake = 2.5;
  const double launch = 2.0;
  const double t_stop = rng.uniform(5.0, 7.0);
  const double t_brake = t_stop - v0 / brake;
  const double t_resume = std::ceil((t_stop + 3.5) / dt) * dt;
  const std::vector<Phase> phases = {
    {t_brake, v0, 0.0, 0.0},
    {v0 / brake, v0, -brake, 0.0},
    {t_resume - t_stop, 0.0, 0.0, 0.0},
    {v0 / launch, 0.0, launch, 0.0},
    {0.0, v0, 0.0, 0.0},
  };
  if (t_resume + 5.0 > duration_of(p)) {
    fail(ErrorCode::kParamError, "scene too short for a stop and resume");
  }
  const Pose2 start{0.0, 0.0, 0.0};
  scene.ego = {"ego", Category::kCar, {}};
  for (std::size_t f = 0; f < p.frames; ++f) {
    const auto s = evaluate(start, phases, static_cast<double>(f) * dt);
    scene.ego.states.push_back(state(s.pose, s.speed, p.ego_length, p.ego_width));
  }
  const double x_stop = evaluate(start, phases, t_stop).pose.x;
  const double x_cross = x_stop + 0.5 * p.ego_length + rng.uniform(4.5, 6.0);
  const double t_centre = t_stop + 1.0;

  AgentTrack crosser;
  if (crossing_car) {
    const double v = 5.0;
    crosser = constant_track("car_0", Category::kCar, {x_cross, -v * t_centre}, kPi / 2, v,
        4.5, 1.9, p.frames, dt);
  } else {
    const double v = rng.uniform(1.2, 1.6);
    crosser = constant_track("pedestrian_0", Category::kPedestrian, {x_cross, -v * t_centre},
        kPi / 2, v, 0.7, 0.7, p.frames, dt);
  }
  scene.agents.push_back(std::move(crosser));
  const auto [lo, hi] = x_extent(scene);
  scene.lanes = make_road(lo, hi, p, SecondLane::kLeftSameDirection);
}

void build_overtake(Scene & scene, Rng & rng, const SynthParams & p)
{
  const double dt = 1.0 / p.frame_rate_hz;
  const double v = cruise_speed(rng, p, 6.0, p.speed_max);
  const double x_car = v * 0.5 * duration_of(p) + rng.uniform(-3.0, 3.0);
  const double w = p.lane_width;
  const std::vector<Shift> shifts = {
    {x_car - 25.0, x_car - 8.0, 0.0, w},
    {x_car + 8.0, x_car + 25.0, w, 0.0},
  };
  scene.ego = shifted_ego(p, v, shifts);
  scene.agents.push_back(constant_track("car_0", Category::kCar,
      {x_car, rng.uniform(-0.3, 0.3)}, 0.0, 0.0, rng.uniform(4.2, 4.9), 1.9, p.frames, dt));
  const auto [lo, hi] = x_extent(scene);
  scene.lanes = make_road(lo, hi, p, SecondLane::kOncoming);
}

void build_construction(Scene & scene, Rng & rng, const SynthParams & p)
{
  const double dt = 1.0 / p.frame_rate_hz;
  const double v = cruise_speed(rng, p, 6.0, p.speed_max);
  const auto n_cones = static_cast<std::size_t>(4 + rng.below(3));
  const double spacing = 4.0;
  const double zone = spacing * static_cast<double>(n_cones - 1);
  const double x_first = v * 0.5 * duration_of(p) - 0.5 * zone;
  const double w = p.lane_width;
  const std::vector<Shift> shifts = {
    {x_first - 25.0, x_first - 8.0, 0.0, w},
    {x_first + zone + 8.0, x_first + zone + 25.0, w, 0.0},
  };
  scene.ego = shifted_ego(p, v, shifts);
  for (std::size_t c = 0; c < n_cones; ++c) {
    const Vec2 at{x_first + spacing * static_cast<double>(c), rng.uniform(-0.6, 0.6)};
    scene.agents.push_back(constant_track("cone_" + std::to_string(c), Category::kTrafficCone,
        at, 0.0, 0.0, 0.5, 0.5, p.frames, dt));
  }
  const auto [lo, hi] = x_extent(scene);
  scene.lanes = make_road(lo, hi, p, SecondLane::kLeftSameDirection);
}

std::string lower(std::string_view s)
{
  std::string out(s);
  for (auto & c : out) {c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));}
  return out;
}

}  // namespace

void validate_synth_params(const SynthParams & p)
{
  auto require = [](bool ok, const char * what) {
      if (!ok) {
        fail(ErrorCode::kParamError, what);
      }
    };
  require(std::isfinite(p.lane_length) && p.lane_length > 0.0, "lane_length must be positive");
  require(std::isfinite(p.lane_width) && p.lane_width > 0.0, "lane_width must be positive");
  require(p.frames >= 2, "frames must be at least 2");
  require(std::isfinite(p.frame_rate_hz) && p.frame_rate_hz > 0.0,
    "frame_rate_hz must be positive");
  require(p.speed_min > 0.0 && p.speed_min <= p.speed_max && std::isfinite(p.speed_max),
    "speed range must satisfy 0 < speed_min <= speed_max");
  require(p.ego_length > 0.0 && p.ego_width > 0.0, "ego extents must be positive");
  require(p.ego_width < 2.0 * p.lane_width, "ego wider than two lanes");
  const auto & t = p.three_point_turn;
  require(t.radius >= 3.0 && std::isfinite(t.radius), "turn radius below 3 m is infeasible");
  require(t.speed > 0.0 && std::isfinite(t.speed), "turn speed must be positive");
  require(t.pause_s >= 0.0 && std::isfinite(t.pause_s), "turn pause must be non-negative");
  for (const double a : t.arcs_deg) {
    require(a > 0.0 && a < 180.0, "each turn arc must lie in (0, 180) degrees");
  }
  require(std::abs(t.arcs_deg[0] + t.arcs_deg[1] + t.arcs_deg[2] - 180.0) < 1e-9,
    "turn arcs must sum to 180 degrees");
}

std::vector<AgentState> synth_three_point_turn(const Pose2 & start,
  const ThreePointTurnParams & params, double dt, double length, double width)
{
  SynthParams check;
  check.three_point_turn = params;
  validate_synth_params(check);
  if (!(dt > 0.0)) {
    fail(ErrorCode::kParamError, "dt must be positive");
  }
  const auto phases = turn_phases(params);
  const double total = total_duration(phases);
  std::vector<AgentState> out;
  for (std::size_t k = 0; static_cast<double>(k) * dt < total - 1e-12; ++k) {
    const auto s = evaluate(start, phases, static_cast<double>(k) * dt);
    out.push_back(state(s.pose, s.speed, length, width));
  }
  // Evaluating the closed-form arcs at the exact end time pins the final heading.
  Sample end{start, 0.0};
  for (const auto & ph : phases) {end = advance(end, ph, ph.duration);}
  end.pose.heading = wrap_angle(end.pose.heading);
  out.push_back(state(end.pose, end.speed, length, width));
  return out;
}

Scene synth_scene(ScenarioTag kind, std::uint64_t seed, const SynthParams & params)
{
  validate_synth_params(params);
  Rng rng(seed);
  Scene scene;
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "_%06llu", static_cast<unsigned long long>(seed));
  scene.id = lower(to_string(kind)) + suffix;
  scene.frame_rate_hz = params.frame_rate_hz;
  scene.scenario_tag = kind;
  switch (kind) {
    case ScenarioTag::kNominal:
      build_nominal(scene, rng, params);
      break;
    case ScenarioTag::kThreePointTurn:
      build_three_point_turn(scene, rng, params);
      break;
    case ScenarioTag::kResumeFromStop:
      build_resume_from_stop(scene, rng, params, seed % 2 == 1);
      break;
    case ScenarioTag::kOvertakeOncoming:
      build_overtake(scene, rng, params);
      break;
    case ScenarioTag::kConstructionZone:
      build_construction(scene, rng, params);
      break;
  }
  if (scene.nav_commands.empty()) {
    scene.nav_commands.assign(params.frames, NavCommand::kKeepForward);
  }
  if (params.global_transform) {
    apply_rigid_transform(scene, rng);
  }
  validate_scene(scene);
  return scene;
}

CorpusManifest synth_corpus(const std::vector<std::pair<ScenarioTag, std::size_t>> & spec,
  std::uint64_t base_seed, const SynthParams & params,
  const std::function<void(Scene &&)> & sink)
{
  validate_synth_params(params);
  CorpusManifest m;
  m.base_seed = base_seed;
  std::uint64_t seed = base_seed;
  for (const auto & [kind, count] : spec) {
    m.total += count;
  }
  for (const auto & [kind, count] : spec) {
    CorpusEntry e;
    e.count = count;
    e.fraction = m.total ? static_cast<double>(count) / static_cast<double>(m.total) : 0.0;
    e.first_seed = seed;
    e.last_seed = count ? seed + count - 1 : seed;
    for (std::size_t i = 0; i < count; ++i) {
      auto scene = synth_scene(kind, seed++, params);
      if (sink) {
        sink(std::move(scene));
      }
    }
    m.kinds.emplace_back(kind, e);
  }
  return m;
}

std::string manifest_to_json(const CorpusManifest & m)
{
  Json kinds = Json::object();
  for (const auto & [kind, e] : m.kinds) {
    kinds[std::string(to_string(kind))] = {{"count", e.count}, {"fraction", e.fraction},
      {"seed_range", e.count ? Json::array({e.first_seed, e.last_seed}) : Json::array()}};
  }
  const Json doc = {{"kinds", kinds}, {"total", m.total}, {"base_seed", m.base_seed}};
  return doc.dump(2) + "\n";
}

std::vector<std::pair<ScenarioTag, std::size_t>> parse_corpus_spec(std::string_view document)
{
  const auto doc = json_util::parse(document, "corpus spec");
  json_util::require_object(doc, "corpus spec");
  std::vector<std::pair<ScenarioTag, std::size_t>> out;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto kind = static_cast<ScenarioTag>(k);
    const auto it = doc.find(std::string(to_string(kind)));
    if (it == doc.end()) {
      continue;
    }
    if (!it->is_number_unsigned()) {
      fail(ErrorCode::kSchemaError, "corpus spec: count for " + it.key() +
        " must be a non-negative integer");
    }
    out.emplace_back(kind, it->get<std::size_t>());
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    parse_scenario_tag(it.key());
  }
  return out;
}

bool closure_holds(const Scene & scene, const SceneLabels & labels, double v_stop)
{
  if (!scene.scenario_tag) {
    return false;
  }
  const auto has = [&](auto pred) {
      return std::any_of(labels.interactions.begin(), labels.interactions.end(), pred);
    };
  switch (*scene.scenario_tag) {
    case ScenarioTag::kNominal:
      return labels.interactions.empty() &&
             std::all_of(labels.ego_decisions.begin(), labels.ego_decisions.end(),
               [](auto d) {return d == EgoLaneDecision::kKeepLane;}) &&
             std::all_of(labels.nav_commands.begin(), labels.nav_commands.end(),
               [](auto c) {return c == NavCommand::kKeepForward;});
    case ScenarioTag::kThreePointTurn:
      return std::any_of(labels.nav_commands.begin(), labels.nav_commands.end(), [](auto c) {
                 return c == NavCommand::kThreePointTurnLeft ||
                 c == NavCommand::kThreePointTurnRight;
               });
    case ScenarioTag::kResumeFromStop:
      return has([&](const InteractionLabel & l) {
                 const bool yield = l.kind == InteractionKind::kYieldToPedestrian ||
                 l.kind == InteractionKind::kYieldToVehicle;
                 return yield && l.end + 1 < scene.frame_count() &&
                 std::abs(scene.ego.states[l.end + 1].speed) >= v_stop;
               });
    case ScenarioTag::kOvertakeOncoming:
      return has([](const InteractionLabel & l) {
                 return l.kind == InteractionKind::kOvertakeLaneChange ||
                 l.kind == InteractionKind::kOvertakeStraddle;
               });
    case ScenarioTag::kConstructionZone: {
        bool any_cone = false;
        for (const auto & a : scene.agents) {
          if (a.category != Category::kTrafficCone) {
            continue;
          }
          any_cone = true;
          if (!has([&](const InteractionLabel & l) {
              return l.agent_id == a.id && l.kind == InteractionKind::kBypassCones;
            }))
          {
            return false;
          }
        }
        return any_cone;
      }
  }
  return false;
}

}  // namespace drivelab
