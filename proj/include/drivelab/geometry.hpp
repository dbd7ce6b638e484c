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

#include "drivelab/scene.hpp"
#include "drivelab/vec2.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace drivelab
{

struct FrenetCoord
{
  double s{0.0};  // arc length from the polyline start, clamped to [0, L]
  double d{0.0};  // signed lateral offset, positive on the left of travel
  std::size_t segment_index{0};
};

/// Polyline with cached cumulative arc length.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  std::span<const Vec2> points() const { return points_; }
  std::size_t segment_count() const { return points_.size() - 1; }
  double length() const { return cumulative_.back(); }
  double station(std::size_t vertex) const { return cumulative_[vertex]; }

  Vec2 point_at(double s) const;
  /// Tangent heading of the segment containing s (s clamped to [0, L]).
  double heading_at(double s) const;
  double segment_heading(std::size_t segment) const;

private:
  std::size_t segment_for(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

/// Global minimum-distance projection; equidistant candidates resolve to the smallest s.
FrenetCoord project_to_polyline(Vec2 point, const Polyline & polyline);
FrenetCoord project_to_polyline(Vec2 point, std::span<const Vec2> polyline);

struct LaneAssociationConfig
{
  double margin{0.5};        // meters beyond half width
  double align_deg{70.0};    // max heading misalignment for vehicles
  bool allow_reverse{true};  // fall back to lanes travelled against their direction
};

/// Indexed view over a scene's lanes with resolved topology.
class LaneMap
{
public:
  explicit LaneMap(std::span<const Lane> lanes);

  std::size_t size() const { return lanes_.size(); }
  const Lane & lane(std::size_t index) const { return lanes_[index]; }
  const Polyline & polyline(std::size_t index) const { return polylines_[index]; }
  std::optional<std::size_t> index_of(const std::string & id) const;

  std::optional<std::size_t> left(std::size_t index) const { return left_[index]; }
  std::optional<std::size_t> right(std::size_t index) const { return right_[index]; }
  const std::vector<std::size_t> & successors(std::size_t index) const { return successors_[index]; }
  const std::vector<std::size_t> & predecessors(std::size_t index) const
  {
    return predecessors_[index];
  }

private:
  std::vector<Lane> lanes_;
  std::vector<Polyline> polylines_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::optional<std::size_t>> left_;
  std::vector<std::optional<std::size_t>> right_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<std::vector<std::size_t>> predecessors_;
};

struct LaneMatch
{
  std::size_t lane_index{0};
  std::string lane_id;
  FrenetCoord frenet;
  /// True when the agent travels against the lane direction (reverse fallback).
  bool reversed{false};
};

/// Lane minimizing |d| among lanes within half_width + margin whose tangent is aligned with
/// the agent heading. Pedestrians, cones and barriers skip the alignment test. Ties go to
/// the lexicographically smaller lane id.
std::optional<LaneMatch> lane_association(const Pose2 & pose, Category category,
  const LaneMap & lanes, const LaneAssociationConfig & config = {});

/// Rectangle footprint centred at `center` with its length along `heading`.
struct OrientedBox
{
  Vec2 center;
  double heading{0.0};
  double length{0.0};
  double width{0.0};

  std::array<Vec2, 4> corners() const;
  bool contains(Vec2 point) const;
};

/// Separating-axis test on closed boxes: touching boxes overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Shortest distance from a point to a polyline (vertex list, possibly a single point).
double distance_to_path(Vec2 point, std::span<const Vec2> path);

}  // namespace drivelab
