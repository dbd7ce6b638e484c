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

/* C interface of the drivelab toolkit. Every call returns a dl_status; on failure the
 * message is available from dl_last_error() on the calling thread. Strings handed out
 * through char ** parameters are owned by the caller and released with dl_string_free. */
#ifndef DRIVELAB_DRIVELAB_H
#define DRIVELAB_DRIVELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define DL_API __declspec(dllexport)
#else
#  define DL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dl_status {
  DL_OK = 0,
  DL_SCHEMA_ERROR = 1,
  DL_REF_ERROR = 2,
  DL_LENGTH_ERROR = 3,
  DL_TOPOLOGY_CYCLE = 4,
  DL_DEGENERATE = 5,
  DL_INSUFFICIENT_FUTURE = 6,
  DL_FORMAT_ERROR = 7,
  DL_MAGIC_ERROR = 8,
  DL_VERSION_ERROR = 9,
  DL_TRUNCATED = 10,
  DL_ALIGN_ERROR = 11,
  DL_NO_LANE = 12,
  DL_PARAM_ERROR = 13,
  DL_INVALID_ARGUMENT = 14,
  DL_IO_ERROR = 15,
  DL_CONFIG_ERROR = 16,
  DL_INTERNAL = 17
} dl_status;

typedef struct dl_config dl_config;
typedef struct dl_scene dl_scene;

DL_API const char * dl_version(void);
/* Symbolic name such as "SCHEMA_ERROR". */
DL_API const char * dl_status_name(dl_status status);
/* Message of the last failed call on this thread; empty after a success. */
DL_API const char * dl_last_error(void);
DL_API void dl_string_free(char * str);

/* Configuration; starts from the defaults. */
DL_API dl_status dl_config_new(dl_config ** out);
DL_API void dl_config_free(dl_config * config);
DL_API dl_status dl_config_merge_json(dl_config * config, const char * json);
DL_API dl_status dl_config_load_file(dl_config * config, const char * path);
/* Dotted key ("metrics.w_lon"); the value is JSON text or a bare string. */
DL_API dl_status dl_config_set(dl_config * config, const char * key, const char * value);
DL_API dl_status dl_config_set_seed(dl_config * config, uint64_t seed);
DL_API dl_status dl_config_to_json(const dl_config * config, char ** out);

/* Scenes. */
DL_API dl_status dl_scene_from_json(const char * json, dl_scene ** out);
DL_API dl_status dl_scene_load_file(const char * path, dl_scene ** out);
DL_API void dl_scene_free(dl_scene * scene);
DL_API dl_status dl_scene_to_json(const dl_scene * scene, char ** out);
DL_API dl_status dl_scene_id(const dl_scene * scene, char ** out);
DL_API dl_status dl_scene_frame_count(const dl_scene * scene, size_t * out);
/* kind is a scenario tag name such as "THREE_POINT_TURN". */
DL_API dl_status dl_synth_scene(const char * kind, uint64_t seed, const dl_config * config,
  dl_scene ** out);
/* Single-line label JSON for the scene. */
DL_API dl_status dl_label_scene(const dl_scene * scene, const dl_config * config, char ** out);

/* Pipeline commands. `paths` lists scene files or directories; `jobs` >= 1. Text outputs
 * are returned through `out`; file outputs go below `out_dir`. Optional paths may be NULL. */
DL_API dl_status dl_run_validate(const char * const * paths, size_t n_paths, size_t jobs,
  char ** out_jsonl, size_t * n_invalid);
DL_API dl_status dl_run_label(const dl_config * config, const char * const * paths,
  size_t n_paths, const char * overrides_path, size_t jobs, char ** out_jsonl);
DL_API dl_status dl_run_gen_qa(const dl_config * config, const char * const * paths,
  size_t n_paths, const char * labels_path, const char * templates_path, size_t jobs,
  char ** out_jsonl);
DL_API dl_status dl_run_synth(const dl_config * config, const char * spec_path,
  const char * out_dir, char ** out_manifest);
DL_API dl_status dl_run_tokenize(const dl_config * config, const char * const * paths,
  size_t n_paths, const char * out_dir, size_t jobs, size_t * n_bundles);
/* planner: "replay", "constant_velocity", "lane_follow", or NULL for the configured one. */
DL_API dl_status dl_run_plan(const dl_config * config, const char * planner,
  const char * const * paths, size_t n_paths, size_t jobs, char ** out_jsonl);
DL_API dl_status dl_run_evaluate(const dl_config * config, const char * plan_path,
  const char * const * paths, size_t n_paths, const char * out_dir, int plots, size_t jobs,
  char ** out_csv);

/* Utilities. `cost` is row-major rows x cols; out_assignment receives `rows` column indices
 * (-1 when a row stays unassigned). */
DL_API dl_status dl_hungarian(const double * cost, size_t rows, size_t cols,
  int32_t * out_assignment);
/* Six waypoints each as x,y pairs at t = 0.5 k s. out receives 1s, 2s, 3s, ave123, ave_all. */
DL_API dl_status dl_traj_l2(const double * pred_xy, const double * gt_xy, size_t n_waypoints,
  double out[5]);

#ifdef __cplusplus
}
#endif

#endif /* DRIVELAB_DRIVELAB_H */
