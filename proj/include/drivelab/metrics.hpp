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

#include "drivelab/geometry.hpp"
#include "drivelab/scene.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drivelab
{

inline constexpr std::size_t kPlanSteps = 6;
inline constexpr double kPlanStepSeconds = 0.5;
inline constexpr double kPlanHorizonSeconds = kPlanSteps * kPlanStepSeconds;

/// Per-step errors plus the 1 s / 2 s / 3 s picks and the two averages.
struct HorizonErrors
{
  std::array<double, kPlanSteps> per_step{};
  double at_1s{0};
  double at_2s{0};
  double at_3s{0};
  double ave123{0};
  double ave_all{0};

  friend bool operator==(const HorizonErrors &, const HorizonErrors &) = default;
};

HorizonErrors aggregate_steps(const std::array<double, kPlanSteps> & per_step);

/// Heading of the segment arriving at each waypoint, starting from the ego origin.
std::array<double, kPlanSteps> plan_headings(const Trajectory & plan, double initial_heading);

/// All three throw kAlignError unless both plans hold 6 waypoints at t = 0.5 k s.
HorizonErrors traj_l2(const Trajectory & pred, const Trajectory & gt);
HorizonErrors heading_l2(const Trajectory & pred, const Trajectory & gt,
  double initial_heading = 0.0);
HorizonErrors lon_weighted_l2(const Trajectory & pred, const Trajectory & gt,
  double w_lon = 2.0, double initial_heading = 0.0);

void check_alignment(const Trajectory & plan);

/// Ground-truth ego future resampled to 6 waypoints in the anchor ego frame.
/// Throws kInsufficientFuture when fewer than 3 s of valid future exist.
Trajectory ego_future_trajectory(const Scene & scene, std::size_t frame);
bool has_full_future(const Scene & scene, std::size_t frame);

/// Fraction of the 6 steps at which the ego box placed on the plan overlaps a GT agent box.
double sample_collision_rate(const Scene & scene, std::size_t frame, const Trajectory & plan);

struct EvalSample
{
  std::string scene_id;
  std::size_t frame{0};
  Trajectory plan;
};

struct MaskResult
{
  std::vector<EvalSample> kept;
  std::size_t masked_count{0};
};

/// Drops samples whose GT future is incomplete. Throws kRefError for unknown scenes.
MaskResult apply_frame_mask(std::vector<EvalSample> samples,
  const std::map<std::string, const Scene *> & scenes);

struct HorizonSummary
{
  double at_1s{0};
  double at_2s{0};
  double at_3s{0};
  double ave123{0};
  double ave_all{0};
};

struct MetricReport
{
  HorizonSummary l2;
  HorizonSummary heading;
  HorizonSummary lonw;
  double collision_rate_ave_all{0};  // percent
  std::size_t n_samples{0};
  std::size_t n_masked{0};
};

struct SampleMetrics
{
  std::string scene_id;
  std::size_t frame{0};
  std::optional<ScenarioTag> tag;
  HorizonErrors l2;
  HorizonErrors heading;
  HorizonErrors lonw;
  double collision_rate{0};  // fraction of steps
};

struct MetricsConfig
{
  double w_lon{2.0};
  double grounding_gate{2.0};
};

struct Evaluation
{
  MetricReport overall;
  std::map<std::string, MetricReport> by_scenario;  // keyed by scenario tag name
  std::vector<SampleMetrics> samples;               // sorted by (scene id, frame)
};

/// Masks, scores and reduces in (scene id, frame) order.
Evaluation evaluate_plans(std::vector<EvalSample> samples,
  const std::map<std::string, const Scene *> & scenes, const MetricsConfig & config = {});

/// Row-wise assignment; -1 marks an unassigned row. Rectangular inputs are padded internally.
/// Among optimal assignments the lexicographically smallest column sequence wins.
/// Throws kInvalidArgument on non-finite or ragged input.
std::vector<int> hungarian(const std::vector<std::vector<double>> & cost);

struct GroundingReport
{
  std::optional<double> precision;  // absent without predictions
  std::optional<double> recall;     // absent without ground truth
  std::size_t matches{0};
};

GroundingReport grounding_prf(std::span<const Vec2> predicted, std::span<const Vec2> ground_truth,
  double gate);

/// Exact-match fraction; absent for an empty input.
std::optional<double> classification_accuracy(
  std::span<const std::pair<std::string, std::string>> pairs);

}  // namespace drivelab
