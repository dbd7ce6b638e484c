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

#include "drivelab/drivelab.h"

#include "drivelab/config.hpp"
#include "drivelab/error.hpp"
#include "drivelab/labels.hpp"
#include "drivelab/metrics.hpp"
#include "drivelab/pipeline.hpp"
#include "drivelab/synth.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct dl_config
{
  drivelab::ToolkitConfig value;
};

struct dl_scene
{
  drivelab::Scene value;
};

namespace
{

thread_local std::string last_error;

dl_status record(drivelab::ErrorCode code, const char * message)
{
  last_error = message;
  return static_cast<dl_status>(code);
}

template <typename Fn>
dl_status guarded(Fn && fn)
{
  try {
    fn();
    last_error.clear();
    return DL_OK;
  } catch (const drivelab::Error & e) {
    return record(e.code(), e.what());
  } catch (const std::bad_alloc &) {
    return record(drivelab::ErrorCode::kInternal, "out of memory");
  } catch (const std::exception & e) {
    return record(drivelab::ErrorCode::kInternal, e.what());
  } catch (...) {
    return record(drivelab::ErrorCode::kInternal, "unknown failure");
  }
}

void require(bool ok, const char * what)
{
  if (!ok) {
    drivelab::fail(drivelab::ErrorCode::kInvalidArgument, what);
  }
}

char * copy_out(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> path_list(const char * const * paths, size_t n)
{
  require(paths != nullptr || n == 0, "paths is null");
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(paths[i] != nullptr, "null path entry");
    out.emplace_back(paths[i]);
  }
  return out;
}

std::optional<std::string> optional_path(const char * p)
{
  return p ? std::optional<std::string>(p) : std::nullopt;
}

const drivelab::ToolkitConfig & config_or_default(const dl_config * config)
{
  static const drivelab::ToolkitConfig defaults;
  return config ? config->value : defaults;
}

}  // namespace

extern "C" {

const char * dl_version(void)
{
  return "1.0.0";
}

const char * dl_status_name(dl_status status)
{
  return drivelab::to_string(static_cast<drivelab::ErrorCode>(status)).data();
}

const char * dl_last_error(void)
{
  return last_error.c_str();
}

void dl_string_free(char * str)
{
  std::free(str);
}

dl_status dl_config_new(dl_config ** out)
{
  return guarded([&] {
             require(out != nullptr, "out is null");
             *out = new dl_config{};
           });
}

void dl_config_free(dl_config * config)
{
  delete config;
}

dl_status dl_config_merge_json(dl_config * config, const char * json)
{
  return guarded([&] {
             require(config && json, "null argument");
             config->value = drivelab::merge_config_json(config->value, json);
           });
}

dl_status dl_config_load_file(dl_config * config, const char * path)
{
  return guarded([&] {
             require(config && path, "null argument");
             const std::string text = drivelab::read_text_file(path);
             try {
               config->value = drivelab::merge_config_json(config->value, text);
             } catch (const drivelab::Error & e) {
               throw drivelab::Error(e.code(), std::string(path) + ": " + e.what());
             }
           });
}

dl_status dl_config_set(dl_config * config, const char * key, const char * value)
{
  return guarded([&] {
             require(config && key && value, "null argument");
             config->value = drivelab::config_set(config->value, key, value);
           });
}

dl_status dl_config_set_seed(dl_config * config, uint64_t seed)
{
  return guarded([&] {
             require(config != nullptr, "config is null");
             config->value.seed = seed;
           });
}

dl_status dl_config_to_json(const dl_config * config, char ** out)
{
  return guarded([&] {
             require(config && out, "null argument");
             *out = copy_out(drivelab::config_to_json(config->value));
           });
}

dl_status dl_scene_from_json(const char * json, dl_scene ** out)
{
  return guarded([&] {
             require(json && out, "null argument");
             *out = new dl_scene{drivelab::load_scene(json)};
           });
}

dl_status dl_scene_load_file(const char * path, dl_scene ** out)
{
  return guarded([&] {
             require(path && out, "null argument");
             *out = new dl_scene{drivelab::load_scene_file(path)};
           });
}

void dl_scene_free(dl_scene * scene)
{
  delete scene;
}

dl_status dl_scene_to_json(const dl_scene * scene, char ** out)
{
  return guarded([&] {
             require(scene && out, "null argument");
             *out = copy_out(drivelab::save_scene(scene->value));
           });
}

dl_status dl_scene_id(const dl_scene * scene, char ** out)
{
  return guarded([&] {
             require(scene && out, "null argument");
             *out = copy_out(scene->value.id);
           });
}

dl_status dl_scene_frame_count(const dl_scene * scene, size_t * out)
{
  return guarded([&] {
             require(scene && out, "null argument");
             *out = scene->value.frame_count();
           });
}

dl_status dl_synth_scene(const char * kind, uint64_t seed, const dl_config * config,
  dl_scene ** out)
{
  return guarded([&] {
             require(kind && out, "null argument");
             const auto tag = drivelab::parse_scenario_tag(kind);
             *out = new dl_scene{drivelab::synth_scene(tag, seed, config_or_default(config).synth)};
           });
}

dl_status dl_label_scene(const dl_scene * scene, const dl_config * config, char ** out)
{
  return guarded([&] {
             require(scene && out, "null argument");
             const auto & c = config_or_default(config);
             *out = copy_out(drivelab::labels_to_json(
                 drivelab::label_scene(scene->value, c.relations, c.interaction)));
           });
}

dl_status dl_run_validate(const char * const * paths, size_t n_paths, size_t jobs,
  char ** out_jsonl, size_t * n_invalid)
{
  return guarded([&] {
             require(out_jsonl != nullptr, "out is null");
             const auto results = drivelab::cmd_validate(path_list(paths, n_paths), jobs);
             size_t bad = 0;
             for (const auto & r : results) {
               bad += r.ok ? 0 : 1;
             }
             *out_jsonl = copy_out(drivelab::validation_to_jsonl(results));
             if (n_invalid) {*n_invalid = bad;}
           });
}

dl_status dl_run_label(const dl_config * config, const char * const * paths, size_t n_paths,
  const char * overrides_path, size_t jobs, char ** out_jsonl)
{
  return guarded([&] {
             require(out_jsonl != nullptr, "out is null");
             *out_jsonl = copy_out(drivelab::cmd_label(path_list(paths, n_paths),
                 config_or_default(config), optional_path(overrides_path), jobs));
           });
}

dl_status dl_run_gen_qa(const dl_config * config, const char * const * paths, size_t n_paths,
  const char * labels_path, const char * templates_path, size_t jobs, char ** out_jsonl)
{
  return guarded([&] {
             require(out_jsonl != nullptr, "out is null");
             *out_jsonl = copy_out(drivelab::cmd_gen_qa(path_list(paths, n_paths),
                 config_or_default(config), optional_path(labels_path),
                 optional_path(templates_path), jobs));
           });
}

dl_status dl_run_synth(const dl_config * config, const char * spec_path, const char * out_dir,
  char ** out_manifest)
{
  return guarded([&] {
             require(spec_path && out_dir, "null argument");
             const auto m = drivelab::cmd_synth(spec_path, out_dir, config_or_default(config));
             if (out_manifest) {*out_manifest = copy_out(drivelab::manifest_to_json(m));}
           });
}

dl_status dl_run_tokenize(const dl_config * config, const char * const * paths, size_t n_paths,
  const char * out_dir, size_t jobs, size_t * n_bundles)
{
  return guarded([&] {
             require(out_dir != nullptr, "out_dir is null");
             const size_t n = drivelab::cmd_tokenize(path_list(paths, n_paths),
             config_or_default(config), out_dir, jobs);
             if (n_bundles) {*n_bundles = n;}
           });
}

dl_status dl_run_plan(const dl_config * config, const char * planner,
  const char * const * paths, size_t n_paths, size_t jobs, char ** out_jsonl)
{
  return guarded([&] {
             require(out_jsonl != nullptr, "out is null");
             auto c = config_or_default(config);
             if (planner) {c.planner = drivelab::parse_planner_kind(planner);}
             *out_jsonl = copy_out(drivelab::cmd_plan(path_list(paths, n_paths), c, jobs));
           });
}

dl_status dl_run_evaluate(const dl_config * config, const char * plan_path,
  const char * const * paths, size_t n_paths, const char * out_dir, int plots, size_t jobs,
  char ** out_csv)
{
  return guarded([&] {
             require(plan_path && out_dir, "null argument");
             const auto ev = drivelab::cmd_evaluate(plan_path, path_list(paths, n_paths),
             config_or_default(config), out_dir, plots != 0, jobs);
             if (out_csv) {*out_csv = copy_out(drivelab::evaluation_report_csv(ev));}
           });
}

dl_status dl_hungarian(const double * cost, size_t rows, size_t cols, int32_t * out_assignment)
{
  return guarded([&] {
             require((cost != nullptr || rows * cols == 0) &&
             (out_assignment != nullptr || rows == 0), "null argument");
             std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
             for (size_t r = 0; r < rows; ++r) {
               for (size_t c = 0; c < cols; ++c) {
                 m[r][c] = cost[r * cols + c];
               }
             }
             const auto a = drivelab::hungarian(m);
             for (size_t r = 0; r < rows; ++r) {
               out_assignment[r] = a[r];
             }
           });
}

dl_status dl_traj_l2(const double * pred_xy, const double * gt_xy, size_t n_waypoints,
  double out[5])
{
  return guarded([&] {
             require(pred_xy && gt_xy && out, "null argument");
             auto make = [&](const double * xy) {
                 drivelab::Trajectory t;
                 for (size_t k = 0; k < n_waypoints; ++k) {
                   t.waypoints.push_back({drivelab::kPlanStepSeconds * static_cast<double>(k + 1),
                       xy[2 * k], xy[2 * k + 1]});
                 }
                 return t;
               };
             const auto e = drivelab::traj_l2(make(pred_xy), make(gt_xy));
             out[0] = e.at_1s;
             out[1] = e.at_2s;
             out[2] = e.at_3s;
             out[3] = e.ave123;
             out[4] = e.ave_all;
           });
}

}  // extern "C"
