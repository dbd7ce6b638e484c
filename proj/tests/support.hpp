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

#include "drivelab/error.hpp"
#include "drivelab/scene.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace drivelab::testing
{

inline Lane straight_lane(std::string id, Vec2 from, Vec2 to, double half_width = 1.85)
{
  Lane lane;
  lane.id = std::move(id);
  lane.centerline = {from, to};
  lane.half_width = half_width;
  return lane;
}

inline AgentState make_state(double x, double y, double heading, double speed,
  double length = 4.5, double width = 2.0)
{
  return {{x, y, heading}, speed, length, width, true};
}

/// Track sampled at `rate` Hz from a position function of time.
inline AgentTrack sampled_track(std::string id, Category category, std::size_t frames,
  double rate, const std::function<Vec2(double)> & at, double length = 4.5, double width = 2.0)
{
  AgentTrack t{std::move(id), category, {}};
  const double dt = 1.0 / rate;
  for (std::size_t f = 0; f < frames; ++f) {
    const double time = static_cast<double>(f) * dt;
    const Vec2 p = at(time);
    const Vec2 ahead = at(time + 1e-3);
    const Vec2 d = ahead - p;
    const double speed = norm(d) / 1e-3;
    const double heading = speed > 1e-6 ? std::atan2(d.y, d.x) : 0.0;
    t.states.push_back(make_state(p.x, p.y, heading, speed, length, width));
  }
  return t;
}

/// Single straight lane along +x with the ego driving it at constant speed.
inline Scene straight_scene(std::size_t frames = 40, double speed = 5.0, double rate = 2.0)
{
  Scene s;
  s.id = "straight";
  s.frame_rate_hz = rate;
  s.lanes.push_back(straight_lane("L0", {-50.0, 0.0}, {400.0, 0.0}));
  s.ego = sampled_track("ego", Category::kCar, frames, rate,
      [speed](double t) {return Vec2{speed * t, 0.0};});
  s.nav_commands.assign(frames, NavCommand::kKeepForward);
  return s;
}

inline double smooth_step(double u)
{
  u = std::clamp(u, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

/// Two same-direction lanes E (y = 0) and R (y = -3.7, right of E). A parked car sits on E and
/// the ego moves to R, drives past and returns to E.
inline Scene right_lane_overtake_scene()
{
  Scene s;
  s.id = "overtake_right_lane";
  s.frame_rate_hz = 2.0;
  Lane e = straight_lane("E", {-50.0, 0.0}, {250.0, 0.0});
  Lane r = straight_lane("R", {-50.0, -3.7}, {250.0, -3.7});
  e.right_neighbor = "R";
  r.left_neighbor = "E";
  s.lanes = {e, r};
  const std::size_t frames = 40;
  const double v = 8.0;
  s.ego = sampled_track("ego", Category::kCar, frames, 2.0, [v](double t) {
        const double x = v * t;
        const double y = -3.7 * (smooth_step((x - 35.0) / 15.0) - smooth_step((x - 70.0) / 15.0));
        return Vec2{x, y};
      });
  AgentTrack parked{"parked_car", Category::kCar, {}};
  for (std::size_t f = 0; f < frames; ++f) {
    parked.states.push_back(make_state(60.0, 0.0, 0.0, 0.0, 4.6, 1.9));
  }
  s.agents.push_back(parked);
  s.nav_commands.assign(frames, NavCommand::kKeepForward);
  return s;
}

/// Collapses consecutive repeats.
template <typename T>
std::vector<T> run_length_values(const std::vector<T> & values)
{
  std::vector<T> out;
  for (const auto & v : values) {
    if (out.empty() || out.back() != v) {
      out.push_back(v);
    }
  }
  return out;
}

/// Code of the drivelab::Error thrown by `fn`, or kOk when it returns normally.
template <typename F>
ErrorCode error_code_of(F && fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

/// Temporary directory removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string & tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;
  const std::string & path() const { return path_; }
  std::string file(const std::string & name) const { return path_ + "/" + name; }

private:
  std::string path_;
};

}  // namespace drivelab::testing
