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

#include "drivelab/interaction.hpp"
#include "drivelab/labels.hpp"
#include "drivelab/relations.hpp"
#include "drivelab/scene.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace drivelab
{

enum class QATask {
  kPerceptionObject,
  kPerceptionLaneAssoc,
  kReasoningObject,
  kReasoningGrounding,
  kPlanning,
};

std::string_view to_string(QATask value);
QATask parse_qa_task(std::string_view name);

/// Object position in the anchor ego frame.
struct ObjectRef
{
  Category category{Category::kOther};
  double x{0};
  double y{0};
  friend bool operator==(const ObjectRef &, const ObjectRef &) = default;
};

struct InteractionPlan
{
  InteractionKind kind{InteractionKind::kOvertakeLaneChange};
  std::optional<PassSide> side;
  ObjectRef object;
  friend bool operator==(const InteractionPlan &, const InteractionPlan &) = default;
};

struct PlanningAnswer
{
  NavCommand nav_command{NavCommand::kKeepForward};
  std::vector<ObjectRef> critical_objects;                 // step 1
  std::vector<InteractionPlan> interactions;               // step 2
  EgoLaneDecision lane_decision{EgoLaneDecision::kKeepLane};
  std::array<Vec2, 6> waypoints{};                          // step 3, t = 0.5 k s
  friend bool operator==(const PlanningAnswer &, const PlanningAnswer &) = default;
};

struct PerceptionObjectPayload
{
  double x{0};
  double y{0};
  Category category{Category::kOther};
  friend bool operator==(const PerceptionObjectPayload &, const PerceptionObjectPayload &) = default;
};

struct LaneAssocPayload
{
  double x{0};
  double y{0};
  LaneMode lane_mode{LaneMode::kNoton};
  friend bool operator==(const LaneAssocPayload &, const LaneAssocPayload &) = default;
};

struct ReasoningObjectPayload
{
  double x{0};
  double y{0};
  bool critical{false};
  CriticalReason reason{CriticalReason::kNone};
  std::optional<InteractionKind> kind;  // set with kHasInteraction
  std::optional<PassSide> side;
  friend bool operator==(const ReasoningObjectPayload &, const ReasoningObjectPayload &) = default;
};

struct GroundingPayload
{
  std::vector<ObjectRef> objects;
  friend bool operator==(const GroundingPayload &, const GroundingPayload &) = default;
};

using QAPayload = std::variant<PerceptionObjectPayload, LaneAssocPayload, ReasoningObjectPayload,
    GroundingPayload, PlanningAnswer>;

struct QARecord
{
  std::string id;  // "<scene>:<frame>:<task>:<k>"
  std::string scene_id;
  std::size_t frame{0};
  QATask task{QATask::kPerceptionObject};
  std::string question;
  std::string answer;
  QAPayload structured;
};

/// Placeholder template: `{field}` substitutes a value, `{{` and `}}` are literal braces.
class TextTemplate
{
public:
  TextTemplate() = default;
  /// Throws kConfigError on malformed syntax or fields outside `allowed`.
  TextTemplate(std::string text, const std::vector<std::string> & allowed);

  const std::string & text() const { return text_; }
  const std::vector<std::string> & fields() const { return fields_; }
  std::string render(const std::map<std::string, std::string> & values) const;
  /// Field values on a full match; repeated fields must agree.
  std::optional<std::map<std::string, std::string>> match(const std::string & text) const;

private:
  struct Piece
  {
    bool is_field;
    std::string value;
  };
  std::string text_;
  std::vector<Piece> pieces_;
  std::vector<std::string> fields_;
};

struct QATemplates
{
  std::map<QATask, std::pair<TextTemplate, TextTemplate>> tasks;  // question, answer
  TextTemplate object_item;
  TextTemplate interaction_item;
  TextTemplate waypoint_item;
  std::string separator{"; "};
  std::string empty_list{"none"};
  std::string yes{"Yes"};
  std::string no{"No"};
  std::map<std::string, TextTemplate> reasons;  // keyed by interaction kind, reason or NONE
};

/// Built-in templates; identical to templates/default_templates.json.
const std::string & default_templates_json();
QATemplates load_templates(std::string_view document);
const QATemplates & default_templates();

struct QAConfig
{
  std::uint64_t seed{0};
  std::size_t perception_distractors{8};  // non-critical agents sampled per frame for perception
  double distractor_ratio{1.0};           // non-critical per critical for reasoning QAs
  InteractionConfig interaction;
};

/// Rounds to the 0.1 m grid used by every rendered number.
double quantize_decimeter(double v);

/// Full-precision planning answer for `frame`; throws kInsufficientFuture near the scene end.
PlanningAnswer planning_answer(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QAConfig & config = {});

std::vector<QARecord> gen_perception_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config = {});
std::vector<QARecord> gen_reasoning_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config = {});
QARecord gen_planning_qa(const Scene & scene, const SceneLabels & labels, std::size_t frame,
  const QATemplates & templates, const QAConfig & config = {});

/// All tasks for one frame in task order; planning is skipped without a full future.
std::vector<QARecord> gen_frame_qas(const Scene & scene, const SceneLabels & labels,
  std::size_t frame, const QATemplates & templates, const QAConfig & config = {});

/// Recovers the structured payload from rendered text. Throws kFormatError on mismatch.
QAPayload parse_qa(QATask task, const std::string & question, const std::string & answer,
  const QATemplates & templates);

std::string payload_to_json(const QAPayload & payload);
/// Single-line JSON with sorted keys.
std::string qa_record_to_json(const QARecord & record);

}  // namespace drivelab
