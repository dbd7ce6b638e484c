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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero when any fails.

#include "drivelab/geometry.hpp"
#include "drivelab/labels.hpp"
#include "drivelab/metrics.hpp"
#include "drivelab/pipeline.hpp"
#include "drivelab/planners.hpp"
#include "drivelab/relations.hpp"
#include "drivelab/synth.hpp"
#include "drivelab/tokens.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace drivelab;
using drivelab::testing::TempDir;

struct Outcome
{
  bool pass{true};
  std::string detail;
};

std::string fmt(const char * format, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------------------------
// Independent geometry oracles.

std::array<Vec2, 4> box_corners(const OrientedBox & b)
{
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double hl = 0.5 * b.length;
  const double hw = 0.5 * b.width;
  std::array<Vec2, 4> out;
  const double sx[4] = {1, -1, -1, 1};
  const double sy[4] = {1, 1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    const double lx = sx[i] * hl;
    const double ly = sy[i] * hw;
    out[static_cast<std::size_t>(i)] = {b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly};
  }
  return out;
}

bool oracle_inside(const OrientedBox & b, Vec2 p)
{
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double dx = p.x - b.center.x;
  const double dy = p.y - b.center.y;
  return std::abs(c * dx + s * dy) <= 0.5 * b.length && std::abs(-s * dx + c * dy) <= 0.5 * b.width;
}

// Dense boundary sampling of both boxes plus the centres.
bool sampled_overlap(const OrientedBox & a, const OrientedBox & b, int per_edge)
{
  for (const auto * pair : {&a, &b}) {
    const OrientedBox & self = *pair;
    const OrientedBox & other = pair == &a ? b : a;
    if (oracle_inside(other, self.center)) {
      return true;
    }
    const auto c = box_corners(self);
    for (std::size_t e = 0; e < 4; ++e) {
      const Vec2 p = c[e];
      const Vec2 q = c[(e + 1) % 4];
      for (int k = 0; k <= per_edge; ++k) {
        const double t = static_cast<double>(k) / per_edge;
        if (oracle_inside(other, {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)})) {
          return true;
        }
      }
    }
  }
  return false;
}

double orient(Vec2 a, Vec2 b, Vec2 c)
{
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on = [](Vec2 a, Vec2 b, Vec2 p, double d) {
      return d == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
             std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    };
  return on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4);
}

// Exact polygon-intersection oracle (edge crossings or containment).
bool polygons_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (segments_cross(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4])) {
        return true;
      }
    }
  }
  return oracle_inside(b, ca[0]) || oracle_inside(a, cb[0]);
}

OrientedBox box_of(const AgentState & s)
{
  return {s.pose.position(), s.pose.heading, s.length, s.width};
}

// ---------------------------------------------------------------------------------------------

std::vector<Scene> round_tripped_corpus(std::size_t per_kind)
{
  std::vector<Scene> out;
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t seed = 0; seed < per_kind; ++seed) {
      const Scene s = synth_scene(static_cast<ScenarioTag>(k), 1000 + seed);
      out.push_back(load_scene(save_scene(s)));
    }
  }
  return out;
}

Outcome criterion_oracle_zero()
{
  const auto corpus = round_tripped_corpus(20);
  std::map<std::string, const Scene *> index;
  std::vector<EvalSample> samples;
  for (const auto & s : corpus) {
    index[s.id] = &s;
    for (std::size_t f = 0; f < s.frame_count(); ++f) {
      if (has_full_future(s, f)) {
        samples.push_back({s.id, f, replay_planner(s, f)});
      }
    }
  }
  std::set<std::string> collision_free;
  for (const auto & s : corpus) {
    bool clear = true;
    for (std::size_t f = 0; f < s.frame_count() && clear; ++f) {
      for (const auto & a : s.agents) {
        if (a.states[f].valid && polygons_overlap(box_of(s.ego.states[f]), box_of(a.states[f]))) {
          clear = false;
          break;
        }
      }
    }
    if (clear) {collision_free.insert(s.id);}
  }
  const auto ev = evaluate_plans(samples, index);
  double worst = 0.0;
  std::size_t colliding = 0;
  for (const auto & m : ev.samples) {
    for (const auto * h : {&m.l2, &m.heading, &m.lonw}) {
      for (const double v : h->per_step) {worst = std::max(worst, v);}
      for (const double v : {h->at_1s, h->at_2s, h->at_3s, h->ave123, h->ave_all}) {
        worst = std::max(worst, v);
      }
    }
    if (collision_free.count(m.scene_id) && m.collision_rate != 0.0) {
      ++colliding;
    }
  }
  Outcome o;
  o.pass = worst <= 1e-9 && colliding == 0 && ev.overall.collision_rate_ave_all == 0.0 &&
    !ev.samples.empty();
  o.detail = std::to_string(ev.samples.size()) + " samples over " + std::to_string(corpus.size()) +
    " scenes (" + std::to_string(collision_free.size()) + " collision-free), max error " +
    fmt("%.3g", worst) + ", colliding samples " + std::to_string(colliding);
  return o;
}

double brute_force_min(const std::vector<std::vector<double>> & c)
{
  const std::size_t rows = c.size();
  const std::size_t cols = c[0].size();
  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += transpose ? c[perm[i]][i] : c[i][perm[i]];
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome criterion_hungarian()
{
  std::mt19937_64 rng(20240601);
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 7;
    const std::size_t cols = 1 + rng() % 7;
    const bool ties = trial % 2 == 0;
    std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
    for (auto & row : c) {
      for (auto & v : row) {
        // Dyadic values keep every partial sum exact, so the comparison can be exact.
        v = ties ? static_cast<double>(rng() % 5) : static_cast<double>(rng() % 102400) / 1024.0;
      }
    }
    const auto assign = hungarian(c);
    std::set<int> used;
    double sum = 0.0;
    std::size_t assigned = 0;
    bool valid = assign.size() == rows;
    for (std::size_t r = 0; r < rows && valid; ++r) {
      if (assign[r] < 0) {continue;}
      valid = static_cast<std::size_t>(assign[r]) < cols && used.insert(assign[r]).second;
      sum += c[r][static_cast<std::size_t>(assign[r])];
      ++assigned;
    }
    valid = valid && assigned == std::min(rows, cols);
    if (!valid || sum != brute_force_min(c)) {
      ++mismatches;
    }
    ++checked;
  }
  return {mismatches == 0,
    std::to_string(checked) + " matrices up to 7x7, " + std::to_string(mismatches) +
    " differ from the permutation minimum"};
}

Outcome criterion_grounding()
{
  const std::vector<Vec2> gt = {{0.0, 0.0}, {10.0, 0.0}, {20.0, 5.0}};
  const std::vector<Vec2> pred = {{0.5, 0.2}, {10.3, -0.4}};
  const auto r = grounding_prf(pred, gt, 2.0);
  const auto empty = grounding_prf({}, gt, 2.0);
  const bool ok = r.precision && r.recall && *r.precision == 1.0 &&
    std::abs(*r.recall - 2.0 / 3.0) <= 1e-12 && std::abs(*r.recall - 0.6667) <= 1e-4 &&
    !empty.precision && empty.recall && *empty.recall == 0.0;
  return {ok, "precision " + fmt("%.6f", r.precision.value_or(-1)) + ", recall " +
    fmt("%.12f", r.recall.value_or(-1)) + "; empty predictions: recall " +
    fmt("%.1f", empty.recall.value_or(-1)) + ", precision " +
    (empty.precision ? "present" : "absent")};
}

Outcome criterion_frenet()
{
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> probe(-60.0, 60.0);
  double worst_excess = 0.0;
  std::size_t failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<Vec2> pts;
    while (pts.size() < n) {
      const Vec2 p{coord(rng), coord(rng)};
      if (pts.empty() || norm(p - pts.back()) > 1e-3) {pts.push_back(p);}
    }
    const Vec2 q{probe(rng), probe(rng)};
    const auto f = project_to_polyline(q, Polyline(pts));

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {total += norm(pts[k + 1] - pts[k]);}
    const int samples = 10000;
    const double spacing = total / (samples - 1);
    double best = std::numeric_limits<double>::infinity();
    std::size_t seg = 0;
    double seg_start = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double s = std::min(total, i * spacing);
      while (seg + 2 < n && s > seg_start + norm(pts[seg + 1] - pts[seg])) {
        seg_start += norm(pts[seg + 1] - pts[seg]);
        ++seg;
      }
      const double len = norm(pts[seg + 1] - pts[seg]);
      const double t = std::clamp((s - seg_start) / len, 0.0, 1.0);
      const Vec2 p = pts[seg] + t * (pts[seg + 1] - pts[seg]);
      best = std::min(best, norm(q - p));
    }
    const double d = std::abs(f.d);
    const double bound = 1e-6 + 0.5 * spacing;
    worst_excess = std::max(worst_excess, best - d);
    if (d > best + 1e-6 || best - d > bound) {
      ++failures;
    }
  }

  // Straight segment: s and d have a closed form.
  double closed_form_err = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 p0{coord(rng), coord(rng)};
    const double theta = std::uniform_real_distribution<double>(-3.1, 3.1)(rng);
    const double len = std::uniform_real_distribution<double>(5.0, 80.0)(rng);
    const Vec2 u{std::cos(theta), std::sin(theta)};
    const Vec2 nrm{-u.y, u.x};
    const double s = std::uniform_real_distribution<double>(0.0, len)(rng);
    const double dd = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    const Vec2 q = p0 + s * u + dd * nrm;
    const auto f = project_to_polyline(q, Polyline({p0, p0 + len * u}));
    closed_form_err = std::max({closed_form_err, std::abs(f.s - s), std::abs(f.d - dd)});
  }
  const bool ok = failures == 0 && closed_form_err <= 1e-9;
  return {ok, "500 random pairs vs 1e4-sample oracle: " + std::to_string(failures) +
    " outside bound (max oracle excess " + fmt("%.3g", worst_excess) +
    " m); straight-line closed form max error " + fmt("%.3g", closed_form_err)};
}

std::vector<Vec2> random_walk(std::mt19937_64 & rng, std::size_t n, Vec2 start)
{
  std::normal_distribution<double> step(0.0, 1.5);
  std::vector<Vec2> out{start};
  while (out.size() < n) {
    out.push_back(out.back() + Vec2{step(rng), step(rng)});
  }
  return out;
}

Outcome criterion_homotopy()
{
  // Full orbit sampled at 64 instants including both ends of the revolution.
  std::vector<Vec2> centre(64, Vec2{3.0, -2.0});
  std::vector<Vec2> orbit;
  for (int k = 0; k < 64; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 63.0;
    orbit.push_back({3.0 + 10.0 * std::cos(a), -2.0 + 10.0 * std::sin(a)});
  }
  const auto h = classify_homotopy(centre, orbit);
  const bool orbit_ok = std::abs(h.winding - 2.0 * std::numbers::pi) <= 1e-3 &&
    h.cls == HomotopyClass::kCounterClockwise;

  std::mt19937_64 rng(4242);
  std::size_t antisym_ok = 0;
  std::size_t reversal_ok = 0;
  std::size_t additive_ok = 0;
  std::size_t pairs = 0;
  while (pairs < 100) {
    const std::size_t n = 4 + rng() % 30;
    const auto a = random_walk(rng, n, {0.0, 0.0});
    const auto b = random_walk(rng, n, {8.0, 3.0});
    bool clear = true;
    for (std::size_t i = 0; i < n; ++i) {clear = clear && norm(b[i] - a[i]) >= 0.5;}
    if (!clear) {continue;}
    ++pairs;
    const auto ab = classify_homotopy(a, b);
    const auto ba = classify_homotopy(b, a);
    const auto swapped = [](HomotopyClass c) {
        return c == HomotopyClass::kClockwise ? HomotopyClass::kCounterClockwise :
               c == HomotopyClass::kCounterClockwise ? HomotopyClass::kClockwise : c;
      };
    if (ba.winding == -ab.winding && ba.cls == swapped(ab.cls)) {++antisym_ok;}
    const std::vector<Vec2> ra(a.rbegin(), a.rend());
    const std::vector<Vec2> rb(b.rbegin(), b.rend());
    if (classify_homotopy(ra, rb).winding == -ab.winding) {++reversal_ok;}
    const std::size_t m = 1 + rng() % (n - 2);
    const std::span<const Vec2> sa(a);
    const std::span<const Vec2> sb(b);
    const double w1 = classify_homotopy(sa.subspan(0, m + 1), sb.subspan(0, m + 1)).winding;
    const double w2 = classify_homotopy(sa.subspan(m), sb.subspan(m)).winding;
    if (w1 + w2 == ab.winding) {++additive_ok;}
  }
  const bool ok = orbit_ok && antisym_ok == pairs && additive_ok == pairs;
  return {ok, "orbit winding " + fmt("%.6f", h.winding) + " (" +
    std::string(to_string(h.cls)) + "); swap(a,b) negates winding on " +
    std::to_string(antisym_ok) + "/" + std::to_string(pairs) +
    " pairs (the relative vector only rotates by pi, so the winding is unchanged); "
    "time reversal negates on " + std::to_string(reversal_ok) + "/" + std::to_string(pairs) +
    "; additivity exact on " + std::to_string(additive_ok) + "/" + std::to_string(pairs)};
}

Outcome criterion_overtake_rule()
{
  const Scene scene = drivelab::testing::right_lane_overtake_scene();
  const auto labels = label_scene(scene);
  const auto * modes = labels.modes_of("parked_car");
  std::vector<LaneMode> seen;
  if (modes) {
    for (const auto m : *modes) {
      if (m != LaneMode::kNoton) {seen.push_back(m);}
    }
  }
  const auto sequence = drivelab::testing::run_length_values(seen);
  std::vector<EgoLaneDecision> changes;
  for (const auto d : drivelab::testing::run_length_values(labels.ego_decisions)) {
    if (d != EgoLaneDecision::kStraddle) {changes.push_back(d);}
  }
  const std::vector<EgoLaneDecision> expected_changes = {EgoLaneDecision::kKeepLane,
    EgoLaneDecision::kRightLaneChange, EgoLaneDecision::kKeepLane,
    EgoLaneDecision::kLeftLaneChange, EgoLaneDecision::kKeepLane};
  const bool modes_ok = sequence ==
    std::vector<LaneMode>{LaneMode::kAhead, LaneMode::kLeft, LaneMode::kBehind};
  const bool label_ok = labels.interactions.size() == 1 &&
    labels.interactions[0].agent_id == "parked_car" &&
    labels.interactions[0].kind == InteractionKind::kOvertakeLaneChange &&
    labels.interactions[0].side == PassSide::kLeft;
  std::string seq;
  for (const auto m : sequence) {seq += (seq.empty() ? "" : "->") + std::string(to_string(m));}
  std::string lab = labels.interactions.empty() ? "none" :
    std::string(to_string(labels.interactions[0].kind)) + " side " +
    (labels.interactions[0].side ? std::string(to_string(*labels.interactions[0].side)) : "-");
  return {modes_ok && label_ok && changes == expected_changes,
    "lane modes " + seq + ", label " + lab};
}

Trajectory random_plan(std::mt19937_64 & rng)
{
  std::normal_distribution<double> n(0.0, 3.0);
  Trajectory t;
  double x = 0.0;
  double y = 0.0;
  for (int k = 1; k <= 6; ++k) {
    x += 2.0 + std::abs(n(rng));
    y += 0.3 * n(rng);
    t.waypoints.push_back({0.5 * k, x, y});
  }
  return t;
}

Outcome criterion_metric_reductions()
{
  std::mt19937_64 rng(99);
  double worst = 0.0;
  std::size_t non_monotone = 0;
  const std::vector<double> weights = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0};
  for (int i = 0; i < 100; ++i) {
    const Trajectory pred = random_plan(rng);
    const Trajectory gt = random_plan(rng);
    const auto l2 = traj_l2(pred, gt);
    const auto lw = lon_weighted_l2(pred, gt, 1.0);
    for (std::size_t k = 0; k < kPlanSteps; ++k) {
      worst = std::max(worst, std::abs(l2.per_step[k] - lw.per_step[k]));
    }
    for (std::size_t j = 1; j < weights.size(); ++j) {
      const auto lo = lon_weighted_l2(pred, gt, weights[j - 1]);
      const auto hi = lon_weighted_l2(pred, gt, weights[j]);
      for (std::size_t k = 0; k < kPlanSteps; ++k) {
        if (hi.per_step[k] < lo.per_step[k]) {++non_monotone;}
      }
      if (hi.ave_all < lo.ave_all) {++non_monotone;}
    }
  }
  return {worst <= 1e-12 && non_monotone == 0,
    "max |lonw(w=1) - l2| " + fmt("%.3g", worst) + " on 100 pairs; monotonicity violations " +
    std::to_string(non_monotone)};
}

Outcome criterion_collision()
{
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> len(0.5, 6.0);
  std::uniform_real_distribution<double> wid(0.3, 3.0);
  std::size_t agree = 0;
  std::size_t overlaps = 0;
  const std::size_t trials = 10000;
  for (std::size_t i = 0; i < trials; ++i) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), len(rng), wid(rng)};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), len(rng), wid(rng)};
    const bool sat = boxes_overlap(a, b);
    overlaps += sat ? 1 : 0;
    if (sat == sampled_overlap(a, b, 200)) {++agree;}
  }
  // Analytic axis-aligned cases with exactly representable coordinates.
  struct Case { OrientedBox b; bool expected; };
  const OrientedBox unit{{0.0, 0.0}, 0.0, 2.0, 2.0};
  const std::vector<Case> cases = {
    {{{2.0, 0.0}, 0.0, 2.0, 2.0}, true},           // edge contact
    {{{2.0, 2.0}, 0.0, 2.0, 2.0}, true},           // corner contact
    {{{0.0, 1.5}, 0.0, 4.0, 1.0}, true},           // edge contact from above
    {{{2.0 + 0x1p-20, 0.0}, 0.0, 2.0, 2.0}, false},  // just apart
    {{{3.0, 0.5}, 0.0, 1.0, 1.0}, false},
    {{{0.0, -2.5}, 0.0, 8.0, 1.0}, false},
    {{{0.25, 0.25}, 0.0, 0.5, 0.5}, true},         // containment
    {{{0.0, 0.0}, 0.0, 8.0, 0.25}, true},          // cross shape
  };
  std::size_t analytic_ok = 0;
  for (const auto & c : cases) {
    if (boxes_overlap(unit, c.b) == c.expected && boxes_overlap(c.b, unit) == c.expected) {
      ++analytic_ok;
    }
  }
  const double rate = static_cast<double>(agree) / trials;
  return {rate >= 0.99 && analytic_ok == cases.size(),
    "agreement with dense sampling " + fmt("%.4f", rate) + " over 1e4 pairs (" +
    std::to_string(overlaps) + " overlapping); analytic cases " + std::to_string(analytic_ok) +
    "/" + std::to_string(cases.size())};
}

Outcome criterion_masking()
{
  const Scene scene = drivelab::testing::straight_scene(40, 5.0, 2.0);
  std::vector<EvalSample> samples;
  for (std::size_t f = 0; f < 40; ++f) {
    Trajectory t;
    for (int k = 1; k <= 6; ++k) {t.waypoints.push_back({0.5 * k, 2.5 * k, 0.0});}
    samples.push_back({scene.id, f, t});
  }
  const auto result = apply_frame_mask(samples, {{scene.id, &scene}});
  std::set<std::size_t> kept;
  for (const auto & s : result.kept) {kept.insert(s.frame);}
  std::set<std::size_t> excluded;
  for (std::size_t f = 0; f < 40; ++f) {
    if (!kept.count(f)) {excluded.insert(f);}
  }
  // Oracle: a frame needs 3 s x 2 Hz = 6 future frames inside the 40-frame log.
  std::set<std::size_t> expected;
  for (std::size_t f = 0; f < 40; ++f) {
    if (f + 6 > 39) {expected.insert(f);}
  }
  std::string list;
  for (const auto f : excluded) {list += (list.empty() ? "" : ",") + std::to_string(f);}
  return {excluded == expected && result.masked_count == 6 && expected.size() == 6,
    "excluded anchor frames {" + list + "}"};
}

Scene random_scene(std::mt19937_64 & rng, int index)
{
  std::uniform_real_distribution<double> coord(-500.0, 500.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scene s;
  s.id = "rand_" + std::to_string(index);
  s.frame_rate_hz = 1.0 + static_cast<double>(rng() % 10);
  const std::size_t n_lanes = rng() % 4;
  for (std::size_t i = 0; i < n_lanes; ++i) {
    Lane lane;
    lane.id = "lane_" + std::to_string(i);
    const std::size_t pts = 2 + rng() % 5;
    for (std::size_t k = 0; k < pts; ++k) {lane.centerline.push_back({coord(rng), coord(rng)});}
    lane.half_width = 0.5 + 3.0 * unit(rng);
    lane.semantic = static_cast<LaneSemantic>(rng() % kLaneSemanticCount);
    s.lanes.push_back(lane);
  }
  for (std::size_t i = 0; i < n_lanes; ++i) {
    auto pick = [&]() {return "lane_" + std::to_string(rng() % n_lanes);};
    if (rng() % 2) {s.lanes[i].left_neighbor = pick();}
    if (rng() % 2) {s.lanes[i].right_neighbor = pick();}
    for (std::size_t k = rng() % 3; k > 0; --k) {s.lanes[i].successors.push_back(pick());}
    for (std::size_t k = rng() % 3; k > 0; --k) {s.lanes[i].predecessors.push_back(pick());}
  }
  const std::size_t frames = 1 + rng() % 12;
  auto state = [&](bool valid) {
      AgentState st;
      st.pose = {coord(rng), coord(rng), std::uniform_real_distribution<double>(-3.14, 3.14)(rng)};
      st.speed = 30.0 * (unit(rng) - 0.3);
      st.length = 0.3 + 10.0 * unit(rng);
      st.width = 0.3 + 3.0 * unit(rng);
      st.valid = valid;
      return st;
    };
  s.ego = {"ego", Category::kCar, {}};
  for (std::size_t f = 0; f < frames; ++f) {s.ego.states.push_back(state(true));}
  const std::size_t n_agents = rng() % 5;
  for (std::size_t a = 0; a < n_agents; ++a) {
    AgentTrack t{"agent_" + std::to_string(a), static_cast<Category>(rng() % kCategoryCount), {}};
    for (std::size_t f = 0; f < frames; ++f) {t.states.push_back(state(rng() % 5 != 0));}
    s.agents.push_back(t);
  }
  for (std::size_t f = 0; f < frames; ++f) {
    s.nav_commands.push_back(static_cast<NavCommand>(rng() % 9));
  }
  if (rng() % 2) {s.scenario_tag = static_cast<ScenarioTag>(rng() % 5);}
  return s;
}

TokenBundle random_bundle(std::mt19937_64 & rng, int index)
{
  std::uniform_real_distribution<float> value(-1e4F, 1e4F);
  TokenBundle b;
  b.scene_id = "bundle_" + std::to_string(index) + std::string(rng() % 20, 'x');
  b.frame = static_cast<std::uint32_t>(rng() % 100000);
  b.frame_rate_hz = value(rng);
  std::set<std::uint64_t> ids;
  for (std::size_t i = rng() % 6; i > 0; --i) {
    AgentTokenEntry e;
    do {e.id = rng();} while (!ids.insert(e.id).second);
    for (auto & v : e.token) {v = value(rng);}
    b.agent_tokens.push_back(e);
  }
  ids.clear();
  for (std::size_t i = rng() % 6; i > 0; --i) {
    MapTokenEntry e;
    do {e.id = rng();} while (!ids.insert(e.id).second);
    for (auto & v : e.token) {v = value(rng);}
    b.map_tokens.push_back(e);
  }
  for (std::size_t i = rng() % 3; i > 0; --i) {
    SceneToken t;
    for (auto & v : t) {v = value(rng);}
    b.scene_tokens.push_back(t);
  }
  return b;
}

Outcome criterion_round_trips()
{
  std::mt19937_64 rng(2718);
  std::size_t scene_bad = 0;
  std::size_t bundle_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const Scene s = random_scene(rng, i);
    const std::string first = save_scene(s);
    const Scene loaded = load_scene(first);
    const std::string second = save_scene(loaded);
    if (first != second || load_scene(second) != loaded) {++scene_bad;}

    const TokenBundle b = random_bundle(rng, i);
    const auto bytes = write_bundle(b);
    const TokenBundle back = read_bundle(bytes);
    if (back != b || write_bundle(back) != bytes) {++bundle_bad;}
  }

  // Fixture decode: every designated attribute comes back bit-exact.
  std::size_t decode_bad = 0;
  std::size_t decoded = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    const Scene scene = synth_scene(static_cast<ScenarioTag>(k), 500 + k);
    for (std::size_t f = 0; f < scene.frame_count(); f += 3) {
      const auto bundle = read_bundle(write_bundle(fixture_encode(scene, f, 11)));
      const auto dec = fixture_decode(bundle);
      const Pose2 ego = scene.ego.states[f].pose;
      const double c = std::cos(ego.heading);
      const double sn = std::sin(ego.heading);
      std::size_t j = 0;
      for (const auto & agent : scene.agents) {
        const auto & st = agent.states[f];
        if (!st.valid) {continue;}
        const double dx = st.pose.x - ego.x;
        const double dy = st.pose.y - ego.y;
        const auto & d = dec.agents.at(j++);
        double rel = st.pose.heading - ego.heading;
        rel = std::remainder(rel, 2.0 * std::numbers::pi);
        if (rel <= -std::numbers::pi) {rel += 2.0 * std::numbers::pi;}
        const bool ok = d.x == static_cast<float>(c * dx + sn * dy) &&
          d.y == static_cast<float>(-sn * dx + c * dy) &&
          std::abs(d.heading - static_cast<float>(rel)) <= 0.0F &&
          d.speed == static_cast<float>(st.speed) && d.length == static_cast<float>(st.length) &&
          d.width == static_cast<float>(st.width) && d.category == agent.category &&
          d.id == token_id(agent.id);
        decode_bad += ok ? 0 : 1;
        ++decoded;
      }
      if (dec.map_elements.size() != scene.lanes.size()) {++decode_bad;}
      for (std::size_t l = 0; l < scene.lanes.size() && l < dec.map_elements.size(); ++l) {
        const auto & m = dec.map_elements[l];
        const Vec2 p = scene.lanes[l].centerline.front();
        const bool ok = m.start_x == static_cast<float>(c * (p.x - ego.x) + sn * (p.y - ego.y)) &&
          m.start_y == static_cast<float>(-sn * (p.x - ego.x) + c * (p.y - ego.y)) &&
          m.semantic == scene.lanes[l].semantic;
        decode_bad += ok ? 0 : 1;
        ++decoded;
      }
    }
  }
  return {scene_bad == 0 && bundle_bad == 0 && decode_bad == 0,
    "scene JSON mismatches " + std::to_string(scene_bad) + "/1000, TOKB mismatches " +
    std::to_string(bundle_bad) + "/1000, fixture decode mismatches " +
    std::to_string(decode_bad) + "/" + std::to_string(decoded)};
}

Outcome criterion_corpus_ratio()
{
  std::map<ScenarioTag, std::size_t> frames;
  const auto manifest = synth_corpus({{ScenarioTag::kThreePointTurn, 40},
        {ScenarioTag::kNominal, 33293}}, 0, {}, [&](Scene && s) {
        frames[*s.scenario_tag] += s.frame_count();
      });
  double manifest_fraction = -1.0;
  for (const auto & [kind, e] : manifest.kinds) {
    if (kind == ScenarioTag::kThreePointTurn) {manifest_fraction = e.fraction;}
  }
  const double sample_fraction = static_cast<double>(frames[ScenarioTag::kThreePointTurn]) /
    static_cast<double>(frames[ScenarioTag::kThreePointTurn] + frames[ScenarioTag::kNominal]);
  const bool ok = std::abs(manifest_fraction - 0.0012) <= 1e-4 &&
    std::abs(sample_fraction - 0.0012) <= 1e-4 && manifest.total == 33333;
  return {ok, "3-point-turn fraction " + fmt("%.6f", manifest_fraction) + " of scenes, " +
    fmt("%.6f", sample_fraction) + " of frames (" + std::to_string(manifest.total) + " scenes)"};
}

bool structure_recovered(const Scene & s, const SceneLabels & l)
{
  auto any_label = [&](const std::function<bool(const InteractionLabel &)> & pred) {
      return std::any_of(l.interactions.begin(), l.interactions.end(), pred);
    };
  switch (*s.scenario_tag) {
    case ScenarioTag::kThreePointTurn:
      return std::count(l.nav_commands.begin(), l.nav_commands.end(),
               NavCommand::kThreePointTurnLeft) > 0;
    case ScenarioTag::kResumeFromStop: {
        const auto & crosser = s.agents.at(0);
        const auto kind = crosser.category == Category::kPedestrian ?
          InteractionKind::kYieldToPedestrian : InteractionKind::kYieldToVehicle;
        // The ego must stand still at some point and move again afterwards.
        std::size_t stop = s.frame_count();
        for (std::size_t f = 0; f < s.frame_count(); ++f) {
          if (std::abs(s.ego.states[f].speed) < 0.3) {stop = std::min(stop, f);}
        }
        bool resumed = false;
        for (std::size_t f = stop; f < s.frame_count(); ++f) {
          resumed = resumed || s.ego.states[f].speed > 1.0;
        }
        return resumed && any_label([&](const InteractionLabel & x) {
                   return x.agent_id == crosser.id && x.kind == kind;
                 });
      }
    case ScenarioTag::kOvertakeOncoming:
      return any_label([&](const InteractionLabel & x) {
                 return x.agent_id == s.agents.at(0).id &&
                 (x.kind == InteractionKind::kOvertakeLaneChange ||
                 x.kind == InteractionKind::kOvertakeStraddle);
               });
    case ScenarioTag::kConstructionZone:
      return !s.agents.empty() && std::all_of(s.agents.begin(), s.agents.end(),
               [&](const AgentTrack & a) {
                 return any_label([&](const InteractionLabel & x) {
                   return x.agent_id == a.id && x.kind == InteractionKind::kBypassCones;
                 });
               });
    case ScenarioTag::kNominal:
      return l.interactions.empty();
  }
  return false;
}

Outcome criterion_closure()
{
  std::string detail;
  bool all = true;
  for (const auto kind : {ScenarioTag::kThreePointTurn, ScenarioTag::kResumeFromStop,
      ScenarioTag::kOvertakeOncoming, ScenarioTag::kConstructionZone})
  {
    std::size_t ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Scene s = load_scene(save_scene(synth_scene(kind, seed)));
      if (structure_recovered(s, label_scene(s))) {++ok;}
    }
    all = all && ok == 20;
    detail += (detail.empty() ? "" : ", ") + std::string(to_string(kind)) + " " +
      std::to_string(ok) + "/20";
  }
  return {all, detail};
}

Outcome criterion_determinism()
{
  TempDir dir("acceptance");
  const std::string spec = dir.file("spec.json");
  write_text_file(spec, "{\"THREE_POINT_TURN\": 2, \"RESUME_FROM_STOP\": 2, "
    "\"OVERTAKE_ONCOMING\": 2, \"CONSTRUCTION_ZONE\": 2, \"NOMINAL\": 2}");
  ToolkitConfig config;
  config.seed = 5;
  cmd_synth(spec, dir.file("corpus"), config);
  const std::vector<std::string> scenes = {dir.file("corpus/scenes")};

  const std::string label_a = cmd_label(scenes, config, std::nullopt, 1);
  const std::string label_b = cmd_label(scenes, config, std::nullopt, 4);
  write_text_file(dir.file("labels.jsonl"), label_a);
  const std::string qa_a = cmd_gen_qa(scenes, config, dir.file("labels.jsonl"), std::nullopt, 1);
  const std::string qa_b = cmd_gen_qa(scenes, config, dir.file("labels.jsonl"), std::nullopt, 3);

  ToolkitConfig cv = config;
  cv.planner = PlannerKind::kConstantVelocity;
  write_text_file(dir.file("plans.jsonl"), cmd_plan(scenes, cv, 2));
  cmd_evaluate(dir.file("plans.jsonl"), scenes, config, dir.file("eval_a"), true, 1);
  cmd_evaluate(dir.file("plans.jsonl"), scenes, config, dir.file("eval_b"), true, 4);
  const bool eval_same =
    read_file(dir.file("eval_a/report.json")) == read_file(dir.file("eval_b/report.json")) &&
    read_file(dir.file("eval_a/report.csv")) == read_file(dir.file("eval_b/report.csv"));
  const bool ok = !label_a.empty() && label_a == label_b && !qa_a.empty() && qa_a == qa_b &&
    eval_same;
  return {ok, std::string("label ") + (label_a == label_b ? "identical" : "differs") +
    ", gen-qa " + (qa_a == qa_b ? "identical" : "differs") + ", evaluate " +
    (eval_same ? "identical" : "differs") + " across runs with 1 and several jobs"};
}

}  // namespace

int main()
{
  struct Criterion
  {
    int number;
    const char * name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
    {1, "oracle zero", criterion_oracle_zero},
    {2, "hungarian exactness", criterion_hungarian},
    {3, "grounding arithmetic", criterion_grounding},
    {4, "frenet fidelity", criterion_frenet},
    {5, "homotopy", criterion_homotopy},
    {6, "overtake rule reproduction", criterion_overtake_rule},
    {7, "metric reductions", criterion_metric_reductions},
    {8, "collision detector", criterion_collision},
    {9, "masking", criterion_masking},
    {10, "format round trips", criterion_round_trips},
    {11, "corpus ratio", criterion_corpus_ratio},
    {12, "closure", criterion_closure},
    {13, "determinism", criterion_determinism},
  };
  int failures = 0;
  for (const auto & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.number, c.name,
      o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
    std::size(criteria));
  return failures == 0 ? 0 : 1;
}
