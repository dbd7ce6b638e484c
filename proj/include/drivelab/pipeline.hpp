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

#include "drivelab/config.hpp"
#include "drivelab/error.hpp"
#include "drivelab/metrics.hpp"
#include "drivelab/synth.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drivelab
{

/// Files named directly are kept; directories contribute their *.json entries. The result is
/// sorted and free of duplicates.
std::vector<std::string> expand_scene_paths(const std::vector<std::string> & paths);

std::string read_text_file(const std::string & path);
/// Writes through a temporary sibling and renames, creating parent directories.
void write_text_file(const std::string & path, std::string_view content);

/// Plan file: one {"scene_id", "frame", "waypoints": [[x, y] x 6]} object per line.
std::string plans_to_jsonl(const std::vector<EvalSample> & plans);
/// Throws kFormatError with the 1-based line number on malformed lines or duplicates.
std::vector<EvalSample> parse_plans_jsonl(std::string_view document);

/// Report JSON: resolved config, overall and per-scenario summaries, and per-sample rows.
std::string evaluation_report_json(const Evaluation & evaluation, const ToolkitConfig & config);
/// One row per scope ("overall" then scenario tags) in a fixed column order.
std::string evaluation_report_csv(const Evaluation & evaluation);
/// Plan and ground truth in the anchor ego frame, with agent boxes at the anchor frame.
std::string trajectory_svg(const Scene & scene, std::size_t frame, const Trajectory & plan);

struct ValidationResult
{
  std::string path;
  bool ok{true};
  ErrorCode code{ErrorCode::kOk};
  std::string message;
};

std::vector<ValidationResult> cmd_validate(const std::vector<std::string> & paths,
  std::size_t jobs = 1);
std::string validation_to_jsonl(const std::vector<ValidationResult> & results);

/// Label JSON-lines sorted by scene id. `overrides_path` names an optional sidecar.
std::string cmd_label(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::optional<std::string> & overrides_path, std::size_t jobs = 1);

/// QA JSON-lines for every frame of every scene. Labels come from `labels_path` when given
/// (every scene must be present) and are computed otherwise.
std::string cmd_gen_qa(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::optional<std::string> & labels_path,
  const std::optional<std::string> & templates_path, std::size_t jobs = 1);

/// Writes <out_dir>/scenes/<scene_id>.json and <out_dir>/manifest.json.
CorpusManifest cmd_synth(const std::string & spec_path, const std::string & out_dir,
  const ToolkitConfig & config);

/// Writes one <scene_id>_f<frame>.tokb bundle per frame into `out_dir`; returns the count.
std::size_t cmd_tokenize(const std::vector<std::string> & scene_paths,
  const ToolkitConfig & config, const std::string & out_dir, std::size_t jobs = 1);

/// Plan file produced by the configured planner for every frame with a full future.
std::string cmd_plan(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  std::size_t jobs = 1);

/// Writes <out_dir>/report.json and <out_dir>/report.csv, plus one SVG per scored sample under
/// <out_dir>/plots when `plots` is set.
Evaluation cmd_evaluate(const std::string & plan_path,
  const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::string & out_dir, bool plots, std::size_t jobs = 1);

}  // namespace drivelab
