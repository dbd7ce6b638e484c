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

#include "drivelab/metrics.hpp"

#include "drivelab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace drivelab
{

namespace
{

constexpr double kTimeTolerance = 1e-9;

double mean_of(std::span<const double> values)
{
  double sum = 0.0;
  for (const double v : values) {sum += v;}
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

Vec2 waypoint_xy(const Waypoint & w) { return {w.x, w.y}; }

// Fractional frame index reached k plan steps after `frame`.
double step_frame(const Scene & scene, std::size_t frame, std::size_t k)
{
  return static_cast<double>(frame) +
         static_cast<double>(k) * kPlanStepSeconds * scene.frame_rate_hz;
}

std::size_t last_needed_frame(const Scene & scene, std::size_t frame)
{
  const double f = step_frame(scene, frame, kPlanSteps);
  const double r = std::round(f);
  return static_cast<std::size_t>(std::abs(f - r) < kTimeTolerance ? r : std::ceil(f));
}

void accumulate(HorizonSummary & into, const HorizonErrors & e)
{
  into.at_1s += e.at_1s;
  into.at_2s += e.at_2s;
  into.at_3s += e.at_3s;
  into.ave123 += e.ave123;
  into.ave_all += e.ave_all;
}

void scale(HorizonSummary & s, double f)
{
  s.at_1s *= f;
  s.at_2s *= f;
  s.at_3s *= f;
  s.ave123 *= f;
  s.ave_all *= f;
}

MetricReport reduce(std::span<const SampleMetrics * const> samples, std::size_t masked)
{
  MetricReport r;
  r.n_samples = samples.size();
  r.n_masked = masked;
  for (const auto * s : samples) {
    accumulate(r.l2, s->l2);
    accumulate(r.heading, s->heading);
    accumulate(r.lonw, s->lonw);
    r.collision_rate_ave_all += s->collision_rate;
  }
  if (!samples.empty()) {
    const double f = 1.0 / static_cast<double>(samples.size());
    scale(r.l2, f);
    scale(r.heading, f);
    scale(r.lonw, f);
    r.collision_rate_ave_all *= 100.0 * f;
  }
  return r;
}

}  // namespace

HorizonErrors aggregate_steps(const std::array<double, kPlanSteps> & per_step)
{
  HorizonErrors e;
  e.per_step = per_step;
  e.at_1s = per_step[1];
  e.at_2s = per_step[3];
  e.at_3s = per_step[5];
  e.ave123 = (e.at_1s + e.at_2s + e.at_3s) / 3.0;
  e.ave_all = mean_of(per_step);
  return e;
}

void check_alignment(const Trajectory & plan)
{
  if (plan.size() != kPlanSteps) {
    fail(ErrorCode::kAlignError, "plan must hold 6 waypoints, got " + std::to_string(plan.size()));
  }
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    const auto & w = plan.waypoints[k];
    const double expected = static_cast<double>(k + 1) * kPlanStepSeconds;
    if (std::abs(w.t - expected) > kTimeTolerance) {
      fail(ErrorCode::kAlignError, "waypoint " + std::to_string(k) + " not at t=" +
        std::to_string(expected));
    }
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      fail(ErrorCode::kAlignError, "non-finite waypoint " + std::to_string(k));
    }
  }
}

std::array<double, kPlanSteps> plan_headings(const Trajectory & plan, double initial_heading)
{
  Trajectory with_origin;
  with_origin.waypoints.push_back({0.0, 0.0, 0.0});
  with_origin.waypoints.insert(with_origin.waypoints.end(), plan.waypoints.begin(),
    plan.waypoints.end());
  const auto h = headings_from_waypoints(with_origin, initial_heading);
  std::array<double, kPlanSteps> out{};
  for (std::size_t k = 0; k < kPlanSteps && k < h.size(); ++k) {
    out[k] = h[k];
  }
  return out;
}

HorizonErrors traj_l2(const Trajectory & pred, const Trajectory & gt)
{
  check_alignment(pred);
  check_alignment(gt);
  std::array<double, kPlanSteps> d{};
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    d[k] = norm(waypoint_xy(pred.waypoints[k]) - waypoint_xy(gt.waypoints[k]));
  }
  return aggregate_steps(d);
}

HorizonErrors heading_l2(const Trajectory & pred, const Trajectory & gt, double initial_heading)
{
  check_alignment(pred);
  check_alignment(gt);
  const auto hp = plan_headings(pred, initial_heading);
  const auto hg = plan_headings(gt, initial_heading);
  std::array<double, kPlanSteps> d{};
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    d[k] = std::abs(wrap_angle(hp[k] - hg[k]));
  }
  return aggregate_steps(d);
}

HorizonErrors lon_weighted_l2(const Trajectory & pred, const Trajectory & gt, double w_lon,
  double initial_heading)
{
  check_alignment(pred);
  check_alignment(gt);
  const auto hg = plan_headings(gt, initial_heading);
  std::array<double, kPlanSteps> d{};
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    const Vec2 e = waypoint_xy(pred.waypoints[k]) - waypoint_xy(gt.waypoints[k]);
    const Vec2 u = unit_from_angle(hg[k]);
    d[k] = std::hypot(w_lon * dot(e, u), cross(u, e));
  }
  return aggregate_steps(d);
}

bool has_full_future(const Scene & scene, std::size_t frame)
{
  if (frame >= scene.frame_count()) {
    return false;
  }
  const std::size_t last = last_needed_frame(scene, frame);
  if (last >= scene.frame_count()) {
    return false;
  }
  for (std::size_t f = frame; f <= last; ++f) {
    if (!scene.ego.states[f].valid) {
      return false;
    }
  }
  return true;
}

Trajectory ego_future_trajectory(const Scene & scene, std::size_t frame)
{
  if (!has_full_future(scene, frame)) {
    fail(ErrorCode::kInsufficientFuture, "scene " + scene.id + " frame " + std::to_string(frame) +
      " lacks 3 s of valid ego future");
  }
  const Pose2 & anchor = scene.ego.states[frame].pose;
  Trajectory out;
  for (std::size_t k = 1; k <= kPlanSteps; ++k) {
    const double f = step_frame(scene, frame, k);
    const double r = std::round(f);
    Vec2 p;
    if (std::abs(f - r) < kTimeTolerance) {
      p = scene.ego.states[static_cast<std::size_t>(r)].pose.position();
    } else {
      const auto lo = static_cast<std::size_t>(std::floor(f));
      const double a = f - static_cast<double>(lo);
      const Vec2 p0 = scene.ego.states[lo].pose.position();
      const Vec2 p1 = scene.ego.states[lo + 1].pose.position();
      p = p0 + (p1 - p0) * a;
    }
    const Vec2 local = to_local(anchor, p);
    out.waypoints.push_back({static_cast<double>(k) * kPlanStepSeconds, local.x, local.y});
  }
  return out;
}

double sample_collision_rate(const Scene & scene, std::size_t frame, const Trajectory & plan)
{
  check_alignment(plan);
  const auto & anchor_state = scene.ego.states.at(frame);
  const Pose2 & anchor = anchor_state.pose;
  const auto headings = plan_headings(plan, 0.0);
  std::size_t colliding = 0;
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    const auto f = static_cast<std::size_t>(std::llround(step_frame(scene, frame, k + 1)));
    if (f >= scene.frame_count()) {
      continue;
    }
    const OrientedBox ego_box{to_global(anchor, waypoint_xy(plan.waypoints[k])),
      wrap_angle(anchor.heading + headings[k]), anchor_state.length, anchor_state.width};
    for (const auto & agent : scene.agents) {
      const auto & s = agent.states[f];
      if (!s.valid) {
        continue;
      }
      if (boxes_overlap(ego_box, OrientedBox{s.pose.position(), s.pose.heading, s.length, s.width})) {
        ++colliding;
        break;
      }
    }
  }
  return static_cast<double>(colliding) / static_cast<double>(kPlanSteps);
}

MaskResult apply_frame_mask(std::vector<EvalSample> samples,
  const std::map<std::string, const Scene *> & scenes)
{
  MaskResult out;
  for (auto & sample : samples) {
    const auto it = scenes.find(sample.scene_id);
    if (it == scenes.end()) {
      fail(ErrorCode::kRefError, "plan references unknown scene " + sample.scene_id);
    }
    if (has_full_future(*it->second, sample.frame)) {
      out.kept.push_back(std::move(sample));
    } else {
      ++out.masked_count;
    }
  }
  return out;
}

Evaluation evaluate_plans(std::vector<EvalSample> samples,
  const std::map<std::string, const Scene *> & scenes, const MetricsConfig & config)
{
  std::stable_sort(samples.begin(), samples.end(), [](const auto & a, const auto & b) {
      return std::tie(a.scene_id, a.frame) < std::tie(b.scene_id, b.frame);
    });
  auto masked = apply_frame_mask(std::move(samples), scenes);

  Evaluation ev;
  std::map<std::string, std::size_t> masked_by_tag;
  for (auto & sample : masked.kept) {
    const Scene & scene = *scenes.at(sample.scene_id);
    const Trajectory gt = ego_future_trajectory(scene, sample.frame);
    SampleMetrics m;
    m.scene_id = sample.scene_id;
    m.frame = sample.frame;
    m.tag = scene.scenario_tag;
    m.l2 = traj_l2(sample.plan, gt);
    m.heading = heading_l2(sample.plan, gt);
    m.lonw = lon_weighted_l2(sample.plan, gt, config.w_lon);
    m.collision_rate = sample_collision_rate(scene, sample.frame, sample.plan);
    ev.samples.push_back(std::move(m));
  }

  std::vector<const SampleMetrics *> all;
  std::map<std::string, std::vector<const SampleMetrics *>> groups;
  for (const auto & m : ev.samples) {
    all.push_back(&m);
    groups[m.tag ? std::string(to_string(*m.tag)) : std::string("UNTAGGED")].push_back(&m);
  }
  ev.overall = reduce(all, masked.masked_count);
  for (const auto & [tag, members] : groups) {
    ev.by_scenario[tag] = reduce(members, 0);
  }
  return ev;
}

std::vector<int> hungarian(const std::vector<std::vector<double>> & cost)
{
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost.front().size();
  double max_abs = 0.0;
  for (const auto & row : cost) {
    if (row.size() != cols) {
      fail(ErrorCode::kInvalidArgument, "ragged cost matrix");
    }
    for (const double c : row) {
      if (!std::isfinite(c)) {
        fail(ErrorCode::kInvalidArgument, "non-finite cost");
      }
      max_abs = std::max(max_abs, std::abs(c));
    }
  }
  if (rows == 0) {
    return {};
  }
  if (cols == 0) {
    return std::vector<int>(rows, -1);
  }

  const std::size_t n = std::max(rows, cols);
  auto a = [&](std::size_t i, std::size_t j) {  // 1-based, padded with zeros
      return (i <= rows && j <= cols) ? cost[i - 1][j - 1] : 0.0;
    };

  // Shortest augmenting paths with row/column potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  // 0-based matching from the solver.
  std::vector<std::size_t> match(n), owner(n);
  for (std::size_t j = 1; j <= n; ++j) {
    match[p[j] - 1] = j - 1;
    owner[j - 1] = p[j] - 1;
  }
  const std::vector<std::size_t> solver_match = match;

  // Lexicographic refinement inside the subgraph of tight edges: every perfect matching
  // there is optimal, so fix rows in order to the smallest column that still completes one.
  const double tol = 1e-10 * std::max(1.0, max_abs);
  auto tight = [&](std::size_t i, std::size_t j) {
      return a(i + 1, j + 1) - u[i + 1] - v[j + 1] <= tol;
    };
  std::vector<bool> col_fixed(n, false);
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (col_fixed[j] || !tight(i, j)) {
        continue;
      }
      if (match[i] == j) {
        break;
      }
      // Re-home row owner[j] onto column match[i] via an alternating path.
      const std::size_t start = owner[j];
      const std::size_t target = match[i];
      std::vector<bool> seen_col(n, false);
      std::vector<std::size_t> queue{start};
      bool found = false;
      seen_col[j] = true;
      for (std::size_t q = 0; q < queue.size() && !found; ++q) {
        const std::size_t r = queue[q];
        for (std::size_t c = 0; c < n; ++c) {
          if (seen_col[c] || col_fixed[c] || !tight(r, c)) {
            continue;
          }
          seen_col[c] = true;
          parent[c] = r;
          if (c == target) {
            found = true;
            break;
          }
          queue.push_back(owner[c]);
        }
      }
      if (!found) {
        continue;
      }
      std::size_t c = target;
      while (true) {
        const std::size_t r = parent[c];
        const std::size_t previous = match[r];
        match[r] = c;
        owner[c] = r;
        if (r == start) {
          break;
        }
        c = previous;
      }
      match[i] = j;
      owner[j] = i;
      break;
    }
    col_fixed[match[i]] = true;
  }

  auto total = [&](const std::vector<std::size_t> & m) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        s += a(i + 1, m[i] + 1);
      }
      return s;
    };
  const auto & chosen = total(match) <= total(solver_match) ? match : solver_match;

  std::vector<int> out(rows, -1);
  for (std::size_t i = 0; i < rows; ++i) {
    if (chosen[i] < cols) {
      out[i] = static_cast<int>(chosen[i]);
    }
  }
  return out;
}

GroundingReport grounding_prf(std::span<const Vec2> predicted, std::span<const Vec2> ground_truth,
  double gate)
{
  GroundingReport report;
  if (!predicted.empty() && !ground_truth.empty()) {
    std::vector<std::vector<double>> cost(predicted.size(),
      std::vector<double>(ground_truth.size()));
    double allowed_sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      for (std::size_t j = 0; j < ground_truth.size(); ++j) {
        cost[i][j] = norm(predicted[i] - ground_truth[j]);
        if (cost[i][j] <= gate) {
          allowed_sum += cost[i][j];
        }
      }
    }
    // Forbidden pairs cost more than any set of allowed ones, so the match count is maximal.
    const double forbidden = 2.0 * allowed_sum + 1.0;
    for (auto & row : cost) {
      for (double & c : row) {
        if (c > gate) {c = forbidden;}
      }
    }
    const auto assignment = hungarian(cost);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] >= 0 &&
        norm(predicted[i] - ground_truth[static_cast<std::size_t>(assignment[i])]) <= gate)
      {
        ++report.matches;
      }
    }
  }
  const auto m = static_cast<double>(report.matches);
  if (!predicted.empty()) {
    report.precision = m / static_cast<double>(predicted.size());
  }
  if (!ground_truth.empty()) {
    report.recall = m / static_cast<double>(ground_truth.size());
  }
  return report;
}

std::optional<double> classification_accuracy(
  std::span<const std::pair<std::string, std::string>> pairs)
{
  if (pairs.empty()) {
    return std::nullopt;
  }
  const auto correct = std::count_if(pairs.begin(), pairs.end(),
      [](const auto & p) {return p.first == p.second;});
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace drivelab
