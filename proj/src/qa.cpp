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

#include "drivelab/qa.hpp"

#include "drivelab/error.hpp"
#include "drivelab/metrics.hpp"
#include "drivelab/tokens.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <regex>
#include <set>

namespace drivelab
{

namespace
{

using json_util::Json;

constexpr std::array<std::string_view, 5> kTaskNames = {
  "PERCEPTION_OBJECT", "PERCEPTION_LANE_ASSOC", "REASONING_OBJECT", "REASONING_GROUNDING",
  "PLANNING"};

const std::map<QATask, std::vector<std::string>> & task_fields()
{
  static const std::map<QATask, std::vector<std::string>> fields = {
    {QATask::kPerceptionObject, {"x", "y", "category"}},
    {QATask::kPerceptionLaneAssoc, {"x", "y", "lane_mode"}},
    {QATask::kReasoningObject, {"x", "y", "verdict", "reason"}},
    {QATask::kReasoningGrounding, {"objects"}},
    {QATask::kPlanning, {"nav_command", "objects", "interactions", "lane_decision", "waypoints"}},
  };
  return fields;
}

std::string escape_regex(std::string_view text)
{
  static const std::string special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (const char c : text) {
    if (special.find(c) != std::string::npos) {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  return out;
}

std::string field_pattern(const std::string & name)
{
  if (name == "x" || name == "y") {
    return R"(-?[0-9]+\.[0-9])";
  }
  if (name == "reason" || name == "objects" || name == "interactions" || name == "waypoints" ||
    name == "verdict")
  {
    return R"([\s\S]*?)";
  }
  return "[A-Z_]+";
}

std::string fmt1(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", quantize_decimeter(v));
  return buf;
}

double parse_number(const std::string & text)
{
  return quantize_decimeter(std::strtod(text.c_str(), nullptr));
}

void require_fields(const std::vector<const TextTemplate *> & parts,
  const std::vector<std::string> & required, const std::string & where)
{
  for (const auto & f : required) {
    const bool present = std::any_of(parts.begin(), parts.end(), [&](const TextTemplate * t) {
          return std::find(t->fields().begin(), t->fields().end(), f) != t->fields().end();
        });
    if (!present) {
      fail(ErrorCode::kConfigError, where + ": template never mentions {" + f + "}");
    }
  }
}

std::mt19937_64 frame_rng(const Scene & scene, std::size_t frame, std::uint64_t seed)
{
  return std::mt19937_64(seed ^ token_id(scene.id) ^
           (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(frame) + 1)));
}

// Uniform sample without replacement; result keeps the pool order.
std::vector<std::size_t> sample(std::vector<std::size_t> pool, std::size_t k, std::mt19937_64 & rng)
{
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

struct AgentView
{
  std::size_t index;  // into scene.agents
  Vec2 local;
  Criticality crit;
};

std::vector<AgentView> agent_views(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QAConfig & config)
{
  const auto crit = critical_objects(scene, labels.interactions, frame, config.interaction);
  const Pose2 & ego = scene.ego.states[frame].pose;
  std::vector<AgentView> out;
  std::size_t c = 0;
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    const auto & s = scene.agents[a].states[frame];
    if (!s.valid) {
      continue;
    }
    out.push_back({a, to_local(ego, s.pose.position()), crit[c++]});
  }
  return out;
}

const InteractionLabel * active_label(const SceneLabels & labels, const std::string & agent_id,
  std::size_t frame)
{
  for (const auto & l : labels.interactions) {
    if (l.agent_id == agent_id && l.covers(frame)) {
      return &l;
    }
  }
  return nullptr;
}

std::string reason_key(const ReasoningObjectPayload & p)
{
  if (p.reason == CriticalReason::kHasInteraction && p.kind) {
    return std::string(to_string(*p.kind));
  }
  return p.reason == CriticalReason::kInEgoCorridor ? "IN_EGO_CORRIDOR" : "NONE";
}

ObjectRef quantized(ObjectRef o)
{
  o.x = quantize_decimeter(o.x);
  o.y = quantize_decimeter(o.y);
  return o;
}

PlanningAnswer quantized(PlanningAnswer a)
{
  for (auto & o : a.critical_objects) {o = quantized(o);}
  for (auto & i : a.interactions) {i.object = quantized(i.object);}
  for (auto & w : a.waypoints) {w = {quantize_decimeter(w.x), quantize_decimeter(w.y)};}
  return a;
}

std::string render_list(const std::vector<std::string> & items, const QATemplates & t)
{
  if (items.empty()) {
    return t.empty_list;
  }
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? t.separator : "") + items[i];
  }
  return out;
}

std::vector<std::map<std::string, std::string>> parse_list(const std::string & text,
  const TextTemplate & item, const QATemplates & t)
{
  std::vector<std::map<std::string, std::string>> out;
  if (text == t.empty_list) {
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(t.separator, pos);
    const auto piece = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    auto fields = item.match(piece);
    if (!fields) {
      fail(ErrorCode::kFormatError, "list item does not match template: '" + piece + "'");
    }
    out.push_back(std::move(*fields));
    if (next == std::string::npos) {
      break;
    }
    pos = next + t.separator.size();
  }
  return out;
}

std::string render_object(const ObjectRef & o, const QATemplates & t)
{
  return t.object_item.render({{"category", std::string(to_string(o.category))},
        {"x", fmt1(o.x)}, {"y", fmt1(o.y)}});
}

ObjectRef object_from(const std::map<std::string, std::string> & f)
{
  return {parse_category(f.at("category")), parse_number(f.at("x")), parse_number(f.at("y"))};
}

std::vector<std::string> render_objects(const std::vector<ObjectRef> & objects,
  const QATemplates & t)
{
  std::vector<std::string> items;
  for (const auto & o : objects) {items.push_back(render_object(o, t));}
  return items;
}

std::pair<std::string, std::string> render(QATask task, const QAPayload & payload,
  const QATemplates & t)
{
  std::map<std::string, std::string> v;
  switch (task) {
    case QATask::kPerceptionObject: {
        const auto & p = std::get<PerceptionObjectPayload>(payload);
        v = {{"x", fmt1(p.x)}, {"y", fmt1(p.y)}, {"category", std::string(to_string(p.category))}};
        break;
      }
    case QATask::kPerceptionLaneAssoc: {
        const auto & p = std::get<LaneAssocPayload>(payload);
        v = {{"x", fmt1(p.x)}, {"y", fmt1(p.y)}, {"lane_mode", std::string(to_string(p.lane_mode))}};
        break;
      }
    case QATask::kReasoningObject: {
        const auto & p = std::get<ReasoningObjectPayload>(payload);
        std::map<std::string, std::string> rv;
        if (p.side) {
          rv["side"] = std::string(to_string(*p.side));
        }
        v = {{"x", fmt1(p.x)}, {"y", fmt1(p.y)}, {"verdict", p.critical ? t.yes : t.no},
          {"reason", t.reasons.at(reason_key(p)).render(rv)}};
        break;
      }
    case QATask::kReasoningGrounding: {
        const auto & p = std::get<GroundingPayload>(payload);
        v = {{"objects", render_list(render_objects(p.objects, t), t)}};
        break;
      }
    case QATask::kPlanning: {
        const auto & p = std::get<PlanningAnswer>(payload);
        std::vector<std::string> inter;
        for (const auto & i : p.interactions) {
          inter.push_back(t.interaction_item.render({{"kind", std::string(to_string(i.kind))},
              {"side", i.side ? std::string(to_string(*i.side)) : std::string("NONE")},
              {"category", std::string(to_string(i.object.category))},
              {"x", fmt1(i.object.x)}, {"y", fmt1(i.object.y)}}));
        }
        std::vector<std::string> wps;
        for (const auto & w : p.waypoints) {
          wps.push_back(t.waypoint_item.render({{"x", fmt1(w.x)}, {"y", fmt1(w.y)}}));
        }
        v = {{"nav_command", std::string(to_string(p.nav_command))},
          {"objects", render_list(render_objects(p.critical_objects, t), t)},
          {"interactions", render_list(inter, t)},
          {"lane_decision", std::string(to_string(p.lane_decision))},
          {"waypoints", render_list(wps, t)}};
        break;
      }
  }
  const auto & [q, a] = t.tasks.at(task);
  return {q.render(v), a.render(v)};
}

QARecord make_record(const Scene & scene, std::size_t frame, QATask task, std::size_t k,
  QAPayload payload, const QATemplates & t)
{
  QARecord r;
  r.id = scene.id + ":" + std::to_string(frame) + ":" + std::string(to_string(task)) + ":" +
    std::to_string(k);
  r.scene_id = scene.id;
  r.frame = frame;
  r.task = task;
  std::tie(r.question, r.answer) = render(task, payload, t);
  r.structured = std::move(payload);
  return r;
}

void check_frame(const Scene & scene, std::size_t frame)
{
  if (frame >= scene.frame_count()) {
    fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(frame) + " out of range");
  }
}

Json object_json(const ObjectRef & o)
{
  return {{"category", to_string(o.category)}, {"x", o.x}, {"y", o.y}};
}

Json side_json(const std::optional<PassSide> & s)
{
  return s ? Json(to_string(*s)) : Json(nullptr);
}

}  // namespace

std::string_view to_string(QATask value) { return kTaskNames[static_cast<std::size_t>(value)]; }

QATask parse_qa_task(std::string_view name)
{
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) {
      return static_cast<QATask>(i);
    }
  }
  fail(ErrorCode::kConfigError, "unknown QA task '" + std::string(name) + "'");
}

double quantize_decimeter(double v)
{
  const double r = std::round(v * 10.0) / 10.0;
  return r == 0.0 ? 0.0 : r;
}

TextTemplate::TextTemplate(std::string text, const std::vector<std::string> & allowed)
: text_(std::move(text))
{
  std::string literal;
  for (std::size_t i = 0; i < text_.size(); ++i) {
    const char c = text_[i];
    if (c == '{' && i + 1 < text_.size() && text_[i + 1] == '{') {
      literal.push_back('{');
      ++i;
    } else if (c == '}' && i + 1 < text_.size() && text_[i + 1] == '}') {
      literal.push_back('}');
      ++i;
    } else if (c == '{') {
      const auto close = text_.find('}', i);
      if (close == std::string::npos) {
        fail(ErrorCode::kConfigError, "unterminated placeholder in template '" + text_ + "'");
      }
      const std::string name = text_.substr(i + 1, close - i - 1);
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        fail(ErrorCode::kConfigError, "unknown placeholder {" + name + "} in '" + text_ + "'");
      }
      if (!literal.empty()) {
        pieces_.push_back({false, literal});
        literal.clear();
      }
      pieces_.push_back({true, name});
      if (std::find(fields_.begin(), fields_.end(), name) == fields_.end()) {
        fields_.push_back(name);
      }
      i = close;
    } else if (c == '}') {
      fail(ErrorCode::kConfigError, "stray '}' in template '" + text_ + "'");
    } else {
      literal.push_back(c);
    }
  }
  if (!literal.empty()) {
    pieces_.push_back({false, literal});
  }
}

std::string TextTemplate::render(const std::map<std::string, std::string> & values) const
{
  std::string out;
  for (const auto & p : pieces_) {
    if (!p.is_field) {
      out += p.value;
      continue;
    }
    const auto it = values.find(p.value);
    if (it == values.end()) {
      fail(ErrorCode::kInternal, "no value for placeholder {" + p.value + "}");
    }
    out += it->second;
  }
  return out;
}

std::optional<std::map<std::string, std::string>> TextTemplate::match(const std::string & text) const
{
  std::string pattern;
  for (const auto & p : pieces_) {
    pattern += p.is_field ? "(" + field_pattern(p.value) + ")" : escape_regex(p.value);
  }
  const std::regex re(pattern);
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    return std::nullopt;
  }
  std::map<std::string, std::string> out;
  std::size_t group = 1;
  for (const auto & p : pieces_) {
    if (!p.is_field) {
      continue;
    }
    const std::string value = m[static_cast<int>(group++)].str();
    const auto [it, inserted] = out.emplace(p.value, value);
    if (!inserted && it->second != value) {
      return std::nullopt;
    }
  }
  return out;
}

QATemplates load_templates(std::string_view document)
{
  using json_util::field;
  using json_util::get_string;
  const auto doc = json_util::parse(document, "templates");
  json_util::require_object(doc, "templates");
  json_util::only_keys(doc, {"tasks", "items", "list", "verdict", "reasons"}, "templates");
  QATemplates t;
  try {
    const auto & tasks = field(doc, "tasks", "templates");
    json_util::require_object(tasks, "templates.tasks");
    for (const auto & [task, allowed] : task_fields()) {
      const std::string name(to_string(task));
      const std::string at = "templates.tasks." + name;
      const auto & e = field(tasks, name.c_str(), "templates.tasks");
      json_util::require_object(e, at);
      json_util::only_keys(e, {"question", "answer"}, at);
      TextTemplate q(get_string(field(e, "question", at), at + ".question"), allowed);
      TextTemplate a(get_string(field(e, "answer", at), at + ".answer"), allowed);
      require_fields({&q, &a}, allowed, at);
      t.tasks.emplace(task, std::make_pair(std::move(q), std::move(a)));
    }
    for (auto it = tasks.begin(); it != tasks.end(); ++it) {
      if (std::find(kTaskNames.begin(), kTaskNames.end(), it.key()) == kTaskNames.end()) {
        fail(ErrorCode::kConfigError, "templates.tasks: unexpected key '" + it.key() + "'");
      }
    }

    const auto & items = field(doc, "items", "templates");
    json_util::require_object(items, "templates.items");
    json_util::only_keys(items, {"object", "interaction", "waypoint"}, "templates.items");
    const auto item = [&](const char * key, const std::vector<std::string> & allowed) {
        TextTemplate tt(get_string(field(items, key, "templates.items"),
          std::string("templates.items.") + key), allowed);
        require_fields({&tt}, allowed, std::string("templates.items.") + key);
        return tt;
      };
    t.object_item = item("object", {"category", "x", "y"});
    t.interaction_item = item("interaction", {"kind", "side", "category", "x", "y"});
    t.waypoint_item = item("waypoint", {"x", "y"});

    const auto & list = field(doc, "list", "templates");
    json_util::require_object(list, "templates.list");
    json_util::only_keys(list, {"separator", "empty"}, "templates.list");
    t.separator = get_string(field(list, "separator", "templates.list"), "templates.list.separator");
    t.empty_list = get_string(field(list, "empty", "templates.list"), "templates.list.empty");
    if (t.separator.empty()) {
      fail(ErrorCode::kConfigError, "templates.list.separator must not be empty");
    }

    const auto & verdict = field(doc, "verdict", "templates");
    json_util::require_object(verdict, "templates.verdict");
    json_util::only_keys(verdict, {"yes", "no"}, "templates.verdict");
    t.yes = get_string(field(verdict, "yes", "templates.verdict"), "templates.verdict.yes");
    t.no = get_string(field(verdict, "no", "templates.verdict"), "templates.verdict.no");
    if (t.yes == t.no) {
      fail(ErrorCode::kConfigError, "templates.verdict: yes and no must differ");
    }

    const auto & reasons = field(doc, "reasons", "templates");
    json_util::require_object(reasons, "templates.reasons");
    std::vector<std::string> keys = {"NONE", "IN_EGO_CORRIDOR"};
    for (std::size_t k = 0; k < 5; ++k) {
      keys.emplace_back(to_string(static_cast<InteractionKind>(k)));
    }
    for (auto it = reasons.begin(); it != reasons.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        fail(ErrorCode::kConfigError, "templates.reasons: unexpected key '" + it.key() + "'");
      }
    }
    for (const auto & key : keys) {
      const std::string at = "templates.reasons." + key;
      const bool sided = key == "BYPASS_CONES" || key == "OVERTAKE_STRADDLE" ||
        key == "OVERTAKE_LANE_CHANGE";
      const std::vector<std::string> allowed = sided ? std::vector<std::string>{"side"} :
        std::vector<std::string>{};
      TextTemplate tt(get_string(field(reasons, key.c_str(), "templates.reasons"), at), allowed);
      require_fields({&tt}, allowed, at);
      t.reasons.emplace(key, std::move(tt));
    }
  } catch (const Error & e) {
    if (e.code() == ErrorCode::kSchemaError) {
      fail(ErrorCode::kConfigError, e.what());
    }
    throw;
  }
  return t;
}

const QATemplates & default_templates()
{
  static const QATemplates t = load_templates(default_templates_json());
  return t;
}

PlanningAnswer planning_answer(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QAConfig & config)
{
  check_frame(scene, frame);
  PlanningAnswer ans;
  const Trajectory future = ego_future_trajectory(scene, frame);
  for (std::size_t k = 0; k < kPlanSteps; ++k) {
    ans.waypoints[k] = {future.waypoints[k].x, future.waypoints[k].y};
  }
  ans.nav_command = scene.nav_commands[frame];

  const auto views = agent_views(scene, labels, frame, config);
  for (const auto & v : views) {
    if (v.crit.critical) {
      ans.critical_objects.push_back({scene.agents[v.index].category, v.local.x, v.local.y});
    }
  }

  const auto horizon = static_cast<std::size_t>(
    std::llround(kPlanHorizonSeconds * scene.frame_rate_hz));
  const std::size_t last = std::min(frame + horizon, scene.frame_count() - 1);
  for (const auto & l : labels.interactions) {
    if (l.end < frame || l.start > last) {
      continue;
    }
    const auto view = std::find_if(views.begin(), views.end(), [&](const AgentView & v) {
          return scene.agents[v.index].id == l.agent_id;
        });
    if (view == views.end()) {
      continue;
    }
    ans.interactions.push_back({l.kind, l.side,
        {scene.agents[view->index].category, view->local.x, view->local.y}});
  }

  std::optional<EgoLaneDecision> change;
  bool straddle = false;
  for (std::size_t f = frame; f <= last && f < labels.ego_decisions.size(); ++f) {
    const auto d = labels.ego_decisions[f];
    if (!change && (d == EgoLaneDecision::kLeftLaneChange ||
      d == EgoLaneDecision::kRightLaneChange))
    {
      change = d;
    }
    straddle = straddle || d == EgoLaneDecision::kStraddle;
  }
  ans.lane_decision = change ? *change :
    (straddle ? EgoLaneDecision::kStraddle : EgoLaneDecision::kKeepLane);
  return ans;
}

std::vector<QARecord> gen_perception_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config)
{
  check_frame(scene, frame);
  const auto views = agent_views(scene, labels, frame, config);
  std::vector<std::size_t> critical, others;
  for (std::size_t i = 0; i < views.size(); ++i) {
    (views[i].crit.critical ? critical : others).push_back(i);
  }
  auto rng = frame_rng(scene, frame, config.seed);
  auto chosen = sample(others, config.perception_distractors, rng);
  chosen.insert(chosen.end(), critical.begin(), critical.end());
  std::sort(chosen.begin(), chosen.end());

  std::vector<QARecord> out;
  std::size_t k = 0;
  for (const auto i : chosen) {
    const auto & v = views[i];
    out.push_back(make_record(scene, frame, QATask::kPerceptionObject, k++,
        PerceptionObjectPayload{quantize_decimeter(v.local.x), quantize_decimeter(v.local.y),
          scene.agents[v.index].category}, templates));
  }
  k = 0;
  for (const auto i : chosen) {
    const auto & v = views[i];
    const auto * modes = labels.modes_of(scene.agents[v.index].id);
    const LaneMode mode = modes && frame < modes->size() ? (*modes)[frame] : LaneMode::kNoton;
    if (mode == LaneMode::kNoton) {
      continue;
    }
    out.push_back(make_record(scene, frame, QATask::kPerceptionLaneAssoc, k++,
        LaneAssocPayload{quantize_decimeter(v.local.x), quantize_decimeter(v.local.y), mode},
        templates));
  }
  return out;
}

std::vector<QARecord> gen_reasoning_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config)
{
  check_frame(scene, frame);
  const auto views = agent_views(scene, labels, frame, config);
  std::vector<std::size_t> critical, others;
  for (std::size_t i = 0; i < views.size(); ++i) {
    (views[i].crit.critical ? critical : others).push_back(i);
  }
  auto rng = frame_rng(scene, frame, config.seed);
  // Skip the draws consumed by the perception sample so the two stay independent.
  sample(others, config.perception_distractors, rng);
  const auto n_distract = static_cast<std::size_t>(
    std::llround(config.distractor_ratio * static_cast<double>(critical.size())));
  auto chosen = sample(others, n_distract, rng);
  chosen.insert(chosen.end(), critical.begin(), critical.end());
  std::sort(chosen.begin(), chosen.end());

  std::vector<QARecord> out;
  std::size_t k = 0;
  GroundingPayload grounding;
  for (const auto i : chosen) {
    const auto & v = views[i];
    ReasoningObjectPayload p{quantize_decimeter(v.local.x), quantize_decimeter(v.local.y),
      v.crit.critical, v.crit.reason, std::nullopt, std::nullopt};
    if (v.crit.reason == CriticalReason::kHasInteraction) {
      if (const auto * l = active_label(labels, v.crit.agent_id, frame)) {
        p.kind = l->kind;
        p.side = l->side;
      }
    }
    out.push_back(make_record(scene, frame, QATask::kReasoningObject, k++, p, templates));
  }
  for (const auto i : critical) {
    const auto & v = views[i];
    grounding.objects.push_back(quantized(ObjectRef{scene.agents[v.index].category, v.local.x,
        v.local.y}));
  }
  out.push_back(make_record(scene, frame, QATask::kReasoningGrounding, 0, grounding, templates));
  return out;
}

QARecord gen_planning_qa(const Scene & scene, const SceneLabels & labels, std::size_t frame,
  const QATemplates & templates, const QAConfig & config)
{
  return make_record(scene, frame, QATask::kPlanning, 0,
      quantized(planning_answer(scene, labels, frame, config)), templates);
}

std::vector<QARecord> gen_frame_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config)
{
  auto out = gen_perception_qas(scene, labels, frame, templates, config);
  auto reasoning = gen_reasoning_qas(scene, labels, frame, templates, config);
  std::move(reasoning.begin(), reasoning.end(), std::back_inserter(out));
  if (has_full_future(scene, frame)) {
    out.push_back(gen_planning_qa(scene, labels, frame, templates, config));
  }
  return out;
}

QAPayload parse_qa(QATask task, const std::string & question, const std::string & answer,
  const QATemplates & templates)
{
  const auto & [qt, at] = templates.tasks.at(task);
  auto qf = qt.match(question);
  auto af = at.match(answer);
  if (!qf || !af) {
    fail(ErrorCode::kFormatError, std::string(to_string(task)) + ": text does not match template");
  }
  for (const auto & [k, v] : *qf) {
    const auto [it, inserted] = af->emplace(k, v);
    if (!inserted && it->second != v) {
      fail(ErrorCode::kFormatError, "question and answer disagree on {" + k + "}");
    }
  }
  const auto & f = *af;
  try {
    switch (task) {
      case QATask::kPerceptionObject:
        return PerceptionObjectPayload{parse_number(f.at("x")), parse_number(f.at("y")),
          parse_category(f.at("category"))};
      case QATask::kPerceptionLaneAssoc:
        return LaneAssocPayload{parse_number(f.at("x")), parse_number(f.at("y")),
          parse_lane_mode(f.at("lane_mode"))};
      case QATask::kReasoningObject: {
          ReasoningObjectPayload p{parse_number(f.at("x")), parse_number(f.at("y")), false,
            CriticalReason::kNone, std::nullopt, std::nullopt};
          if (f.at("verdict") == templates.yes) {
            p.critical = true;
          } else if (f.at("verdict") != templates.no) {
            fail(ErrorCode::kFormatError, "unknown verdict '" + f.at("verdict") + "'");
          }
          bool matched = false;
          for (std::size_t k = 0; k < 5 && !matched; ++k) {
            const auto kind = static_cast<InteractionKind>(k);
            if (auto rf = templates.reasons.at(std::string(to_string(kind))).match(f.at("reason"))) {
              matched = true;
              p.reason = CriticalReason::kHasInteraction;
              p.kind = kind;
              if (rf->count("side")) {
                p.side = parse_pass_side(rf->at("side"));
              }
            }
          }
          if (!matched && templates.reasons.at("IN_EGO_CORRIDOR").match(f.at("reason"))) {
            matched = true;
            p.reason = CriticalReason::kInEgoCorridor;
          }
          if (!matched && templates.reasons.at("NONE").match(f.at("reason"))) {
            matched = true;
          }
          if (!matched) {
            fail(ErrorCode::kFormatError, "reason matches no template: '" + f.at("reason") + "'");
          }
          return p;
        }
      case QATask::kReasoningGrounding: {
          GroundingPayload p;
          for (const auto & item : parse_list(f.at("objects"), templates.object_item, templates)) {
            p.objects.push_back(object_from(item));
          }
          return p;
        }
      case QATask::kPlanning: {
          PlanningAnswer p;
          p.nav_command = parse_nav_command(f.at("nav_command"));
          for (const auto & item : parse_list(f.at("objects"), templates.object_item, templates)) {
            p.critical_objects.push_back(object_from(item));
          }
          for (const auto & item :
            parse_list(f.at("interactions"), templates.interaction_item, templates))
          {
            InteractionPlan ip;
            ip.kind = parse_interaction_kind(item.at("kind"));
            if (item.at("side") != "NONE") {
              ip.side = parse_pass_side(item.at("side"));
            }
            ip.object = object_from(item);
            p.interactions.push_back(ip);
          }
          p.lane_decision = parse_ego_lane_decision(f.at("lane_decision"));
          const auto wps = parse_list(f.at("waypoints"), templates.waypoint_item, templates);
          if (wps.size() != kPlanSteps) {
            fail(ErrorCode::kFormatError, "planning answer needs 6 waypoints, got " +
              std::to_string(wps.size()));
          }
          for (std::size_t k = 0; k < kPlanSteps; ++k) {
            p.waypoints[k] = {parse_number(wps[k].at("x")), parse_number(wps[k].at("y"))};
          }
          return p;
        }
    }
  } catch (const Error & e) {
    if (e.code() == ErrorCode::kSchemaError) {
      fail(ErrorCode::kFormatError, e.what());
    }
    throw;
  }
  fail(ErrorCode::kInternal, "unhandled QA task");
}

std::string payload_to_json(const QAPayload & payload)
{
  Json j = std::visit([](const auto & p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PerceptionObjectPayload>) {
          return {{"x", p.x}, {"y", p.y}, {"category", to_string(p.category)}};
        } else if constexpr (std::is_same_v<T, LaneAssocPayload>) {
          return {{"x", p.x}, {"y", p.y}, {"lane_mode", to_string(p.lane_mode)}};
        } else if constexpr (std::is_same_v<T, ReasoningObjectPayload>) {
          return {{"x", p.x}, {"y", p.y}, {"critical", p.critical},
            {"reason", to_string(p.reason)},
            {"kind", p.kind ? Json(to_string(*p.kind)) : Json(nullptr)},
            {"side", side_json(p.side)}};
        } else if constexpr (std::is_same_v<T, GroundingPayload>) {
          Json objs = Json::array();
          for (const auto & o : p.objects) {objs.push_back(object_json(o));}
          return {{"objects", objs}};
        } else {
          Json objs = Json::array();
          for (const auto & o : p.critical_objects) {objs.push_back(object_json(o));}
          Json inter = Json::array();
          for (const auto & i : p.interactions) {
            inter.push_back({{"kind", to_string(i.kind)}, {"side", side_json(i.side)},
                {"object", object_json(i.object)}});
          }
          Json wps = Json::array();
          for (const auto & w : p.waypoints) {wps.push_back({w.x, w.y});}
          return {{"nav_command", to_string(p.nav_command)}, {"critical_objects", objs},
            {"interactions", inter}, {"lane_decision", to_string(p.lane_decision)},
            {"waypoints", wps}};
        }
      }, payload);
  return j.dump();
}

std::string qa_record_to_json(const QARecord & record)
{
  Json j = {{"id", record.id}, {"scene_id", record.scene_id}, {"frame", record.frame},
    {"task", to_string(record.task)}, {"question", record.question}, {"answer", record.answer},
    {"structured", Json::parse(payload_to_json(record.structured))}};
  return j.dump();
}

}  // namespace drivelab
