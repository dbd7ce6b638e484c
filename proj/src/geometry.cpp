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

#include "drivelab/geometry.hpp"

#include "drivelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace drivelab
{

namespace
{

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct SegmentHit
{
  double distance;
  double t;
  Vec2 foot;
};

SegmentHit closest_on_segment(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 foot = a + t * ab;
  return {norm(p - foot), t, foot};
}

template <typename Points, typename StationFn>
FrenetCoord project_impl(Vec2 point, const Points & pts, StationFn station)
{
  FrenetCoord best;
  double best_distance = std::numeric_limits<double>::infinity();
  Vec2 best_foot{};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto hit = closest_on_segment(point, pts[k], pts[k + 1]);
    // Strict improvement beyond rounding noise keeps the smallest-s candidate on ties.
    if (k == 0 || hit.distance < best_distance - 1e-12 * (1.0 + best_distance)) {
      best_distance = hit.distance;
      best_foot = hit.foot;
      best.segment_index = k;
      best.s = station(k) + hit.t * norm(pts[k + 1] - pts[k]);
    }
  }
  const std::size_t k = best.segment_index;
  const double side = cross(pts[k + 1] - pts[k], point - best_foot);
  best.d = side < 0.0 ? -best_distance : best_distance;
  return best;
}

}  // namespace

Polyline::Polyline(std::vector<Vec2> points)
: points_(std::move(points))
{
  if (points_.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "polyline needs at least 2 points");
  }
  cumulative_.resize(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + norm(points_[i] - points_[i - 1]);
  }
}

std::size_t Polyline::segment_for(double s) const
{
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, segment_count() - 1);
}

Vec2 Polyline::point_at(double s) const
{
  s = std::clamp(s, 0.0, length());
  const std::size_t k = segment_for(s);
  const double seg = cumulative_[k + 1] - cumulative_[k];
  const double t = seg > 0.0 ? (s - cumulative_[k]) / seg : 0.0;
  return points_[k] + t * (points_[k + 1] - points_[k]);
}

double Polyline::segment_heading(std::size_t segment) const
{
  const Vec2 d = points_[segment + 1] - points_[segment];
  return std::atan2(d.y, d.x);
}

double Polyline::heading_at(double s) const
{
  return segment_heading(segment_for(std::clamp(s, 0.0, length())));
}

FrenetCoord project_to_polyline(Vec2 point, const Polyline & polyline)
{
  return project_impl(point, polyline.points(),
           [&](std::size_t k) {return polyline.station(k);});
}

FrenetCoord project_to_polyline(Vec2 point, std::span<const Vec2> polyline)
{
  return project_to_polyline(point, Polyline({polyline.begin(), polyline.end()}));
}

LaneMap::LaneMap(std::span<const Lane> lanes)
: lanes_(lanes.begin(), lanes.end())
{
  polylines_.reserve(lanes_.size());
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    polylines_.emplace_back(lanes_[i].centerline);
    index_.emplace(lanes_[i].id, i);
  }
  auto resolve = [&](const std::string & id) {
      const auto it = index_.find(id);
      if (it == index_.end()) {
        fail(ErrorCode::kRefError, "unknown lane id '" + id + "'");
      }
      return it->second;
    };
  left_.resize(lanes_.size());
  right_.resize(lanes_.size());
  successors_.resize(lanes_.size());
  predecessors_.resize(lanes_.size());
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    const auto & lane = lanes_[i];
    if (lane.left_neighbor) {left_[i] = resolve(*lane.left_neighbor);}
    if (lane.right_neighbor) {right_[i] = resolve(*lane.right_neighbor);}
    for (const auto & id : lane.successors) {successors_[i].push_back(resolve(id));}
    for (const auto & id : lane.predecessors) {predecessors_[i].push_back(resolve(id));}
  }
}

std::optional<std::size_t> LaneMap::index_of(const std::string & id) const
{
  const auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<LaneMatch> lane_association(const Pose2 & pose, Category category,
  const LaneMap & lanes, const LaneAssociationConfig & config)
{
  std::vector<std::size_t> order(lanes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return lanes.lane(a).id < lanes.lane(b).id;
    });

  const double max_misalign = config.align_deg * kDegToRad;
  const bool check_heading = !is_heading_free(category);

  std::vector<FrenetCoord> frenet(lanes.size());
  for (const auto i : order) {
    frenet[i] = project_to_polyline(pose.position(), lanes.polyline(i));
  }

  auto pick = [&](bool reversed) -> std::optional<LaneMatch> {
      std::optional<LaneMatch> best;
      for (const auto i : order) {
        const auto & f = frenet[i];
        if (std::abs(f.d) > lanes.lane(i).half_width + config.margin) {
          continue;
        }
        if (check_heading) {
          const double tangent = lanes.polyline(i).segment_heading(f.segment_index);
          const double target = reversed ? tangent + std::numbers::pi : tangent;
          if (std::abs(wrap_angle(pose.heading - target)) > max_misalign) {
            continue;
          }
        }
        if (!best || std::abs(f.d) < std::abs(best->frenet.d)) {
          best = LaneMatch{i, lanes.lane(i).id, f, reversed};
        }
      }
      return best;
    };

  if (auto forward = pick(false)) {
    return forward;
  }
  if (check_heading && config.allow_reverse) {
    return pick(true);
  }
  return std::nullopt;
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 u = unit_from_angle(heading) * (0.5 * length);
  const Vec2 v = perp_left(unit_from_angle(heading)) * (0.5 * width);
  return {center + u + v, center - u + v, center - u - v, center + u - v};
}

bool OrientedBox::contains(Vec2 point) const
{
  const Vec2 u = unit_from_angle(heading);
  const Vec2 d = point - center;
  return std::abs(dot(d, u)) <= 0.5 * length && std::abs(cross(u, d)) <= 0.5 * width;
}

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 au = unit_from_angle(a.heading);
  const Vec2 bu = unit_from_angle(b.heading);
  const std::array<Vec2, 4> axes = {au, perp_left(au), bu, perp_left(bu)};
  const Vec2 offset = b.center - a.center;
  for (const auto & axis : axes) {
    const double ra = 0.5 * a.length * std::abs(dot(au, axis)) +
      0.5 * a.width * std::abs(dot(perp_left(au), axis));
    const double rb = 0.5 * b.length * std::abs(dot(bu, axis)) +
      0.5 * b.width * std::abs(dot(perp_left(bu), axis));
    if (std::abs(dot(offset, axis)) > ra + rb) {
      return false;
    }
  }
  return true;
}

double distance_to_path(Vec2 point, std::span<const Vec2> path)
{
  if (path.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  double best = norm(point - path.front());
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    best = std::min(best, closest_on_segment(point, path[k], path[k + 1]).distance);
  }
  return best;
}

}  // namespace drivelab
