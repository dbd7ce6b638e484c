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

#include "drivelab/pipeline.hpp"

#include "drivelab/labels.hpp"
#include "drivelab/qa.hpp"
#include "drivelab/tokens.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace drivelab
{

namespace fs = std::filesystem;
using json_util::Json;

namespace
{

struct LoadedScene
{
  std::string path;
  Scene scene;
};

// Scenes in scene-id order; equal ids keep path order.
std::vector<LoadedScene> load_sorted(const std::vector<std::string> & scene_paths,
  std::size_t jobs)
{
  const auto paths = expand_scene_paths(scene_paths);
  auto loaded = detail::ordered_map(paths.size(), jobs, [&](std::size_t i) {
        return LoadedScene{paths[i], load_scene_file(paths[i])};
      });
  std::stable_sort(loaded.begin(), loaded.end(), [](const auto & a, const auto & b) {
      return a.scene.id < b.scene.id;
    });
  return loaded;
}

std::map<std::string, const Scene *> index_unique(const std::vector<LoadedScene> & scenes)
{
  std::map<std::string, const Scene *> index;
  for (const auto & s : scenes) {
    if (!index.emplace(s.scene.id, &s.scene).second) {
      fail(ErrorCode::kRefError, s.path + ": duplicate scene id '" + s.scene.id + "'");
    }
  }
  return index;
}

template <typename Fn>
auto with_context(const std::string & where, Fn && fn)
{
  try {
    return fn();
  } catch (const Error & e) {
    throw Error(e.code(), where + ": " + e.what());
  }
}

std::string join_lines(const std::vector<std::string> & chunks)
{
  std::string out;
  for (const auto & c : chunks) {
    out += c;
  }
  return out;
}

std::string safe_name(std::string_view id)
{
  std::string out(id);
  for (auto & c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
      c == '.';
    if (!ok) {c = '_';}
  }
  return out;
}

std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return std::string(buf) == "-0.000000" ? "0.000000" : buf;
}

Json summary_json(const HorizonSummary & s)
{
  return {{"1s", s.at_1s}, {"2s", s.at_2s}, {"3s", s.at_3s}, {"ave123", s.ave123},
    {"ave_all", s.ave_all}};
}

Json report_json(const MetricReport & r)
{
  return {{"l2", summary_json(r.l2)}, {"heading", summary_json(r.heading)},
    {"lon_weighted_l2", summary_json(r.lonw)},
    {"collision_rate_pct_ave_all", r.collision_rate_ave_all},
    {"n_samples", r.n_samples}, {"n_masked", r.n_masked}};
}

Json horizon_json(const HorizonErrors & h)
{
  return {{"per_step", h.per_step}, {"1s", h.at_1s}, {"2s", h.at_2s}, {"3s", h.at_3s},
    {"ave123", h.ave123}, {"ave_all", h.ave_all}};
}

}  // namespace

std::vector<std::string> expand_scene_paths(const std::vector<std::string> & paths)
{
  std::set<std::string> out;
  for (const auto & p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto & entry : fs::directory_iterator(p, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          out.insert(entry.path().string());
        }
      }
      if (ec) {
        fail(ErrorCode::kIoError, p + ": " + ec.message());
      }
    } else {
      out.insert(p);
    }
  }
  return {out.begin(), out.end()};
}

std::string read_text_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::kIoError, path + ": cannot open");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string & path, std::string_view content)
{
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      fail(ErrorCode::kIoError, target.parent_path().string() + ": " + ec.message());
    }
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorCode::kIoError, path + ": cannot write");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      fail(ErrorCode::kIoError, path + ": write failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fail(ErrorCode::kIoError, path + ": " + ec.message());
  }
}

std::string plans_to_jsonl(const std::vector<EvalSample> & plans)
{
  std::string out;
  for (const auto & p : plans) {
    Json wps = Json::array();
    for (const auto & w : p.plan.waypoints) {
      wps.push_back({w.x, w.y});
    }
    out += Json{{"scene_id", p.scene_id}, {"frame", p.frame}, {"waypoints", wps}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<EvalSample> parse_plans_jsonl(std::string_view document)
{
  std::vector<EvalSample> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < document.size()) {
    const auto end = std::min(document.find('\n', pos), document.size());
    const auto line = document.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    const std::string where = "plan line " + std::to_string(line_no);
    try {
      const Json j = json_util::parse(line, where);
      json_util::require_object(j, where);
      json_util::only_keys(j, {"scene_id", "frame", "waypoints"}, where);
      EvalSample s;
      s.scene_id = json_util::get_string(json_util::field(j, "scene_id", where), where);
      const auto & frame = json_util::field(j, "frame", where);
      if (!frame.is_number_unsigned()) {
        fail(ErrorCode::kSchemaError, where + ": frame must be a non-negative integer");
      }
      s.frame = frame.get<std::size_t>();
      const auto & wps = json_util::field(j, "waypoints", where);
      json_util::require_array(wps, where);
      if (wps.size() != kPlanSteps) {
        fail(ErrorCode::kAlignError, where + ": expected 6 waypoints");
      }
      for (std::size_t k = 0; k < wps.size(); ++k) {
        if (!wps[k].is_array() || wps[k].size() != 2) {
          fail(ErrorCode::kSchemaError, where + ": waypoint must be [x, y]");
        }
        s.plan.waypoints.push_back({kPlanStepSeconds * static_cast<double>(k + 1),
            json_util::get_real(wps[k][0], where), json_util::get_real(wps[k][1], where)});
      }
      if (!seen.emplace(s.scene_id, s.frame).second) {
        fail(ErrorCode::kFormatError, where + ": duplicate plan for " + s.scene_id + " frame " +
          std::to_string(s.frame));
      }
      out.push_back(std::move(s));
    } catch (const Error & e) {
      const ErrorCode code = e.code() == ErrorCode::kSchemaError ? ErrorCode::kFormatError :
        e.code();
      throw Error(code, e.what());
    }
  }
  return out;
}

std::string evaluation_report_json(const Evaluation & ev, const ToolkitConfig & config)
{
  Json by = Json::object();
  for (const auto & [tag, r] : ev.by_scenario) {
    by[tag] = report_json(r);
  }
  Json samples = Json::array();
  for (const auto & m : ev.samples) {
    samples.push_back({{"scene_id", m.scene_id}, {"frame", m.frame},
        {"scenario", m.tag ? Json(std::string(to_string(*m.tag))) : Json(nullptr)},
        {"l2", horizon_json(m.l2)}, {"heading", horizon_json(m.heading)},
        {"lon_weighted_l2", horizon_json(m.lonw)}, {"collision_rate", m.collision_rate}});
  }
  const Json doc = {{"config", Json::parse(config_to_json(config))},
    {"overall", report_json(ev.overall)}, {"by_scenario", by}, {"samples", samples}};
  return doc.dump(2) + "\n";
}

std::string evaluation_report_csv(const Evaluation & ev)
{
  std::string out = "scope,n_samples,n_masked";
  for (const char * family : {"l2", "heading", "lonw"}) {
    for (const char * h : {"1s", "2s", "3s", "ave123", "aveall"}) {
      out += std::string(",") + family + "_" + h;
    }
  }
  out += ",collision_pct_aveall\n";
  auto row = [&](const std::string & scope, const MetricReport & r) {
      out += scope + "," + std::to_string(r.n_samples) + "," + std::to_string(r.n_masked);
      for (const auto * s : {&r.l2, &r.heading, &r.lonw}) {
        for (const double v : {s->at_1s, s->at_2s, s->at_3s, s->ave123, s->ave_all}) {
          out += "," + fixed(v, 6);
        }
      }
      out += "," + fixed(r.collision_rate_ave_all, 6) + "\n";
    };
  row("overall", ev.overall);
  for (const auto & [tag, r] : ev.by_scenario) {
    row(tag, r);
  }
  return out;
}

std::string trajectory_svg(const Scene & scene, std::size_t frame, const Trajectory & plan)
{
  const auto & ego = scene.ego.states.at(frame);
  const Trajectory gt = ego_future_trajectory(scene, frame);
  // Ego frame x forward maps to screen up; 10 px per meter over a 40 m x 60 m window.
  const double scale = 10.0;
  auto px = [&](Vec2 p) {
      return fixed(200.0 - p.y * scale, 2) + "," + fixed(500.0 - p.x * scale, 2);
    };
  std::string out =
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"600\" "
    "viewBox=\"0 0 400 600\">\n<rect width=\"400\" height=\"600\" fill=\"white\"/>\n";
  for (const auto & lane : scene.lanes) {
    out += "<polyline fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\" points=\"";
    for (const auto & p : lane.centerline) {
      out += px(to_local(ego.pose, p)) + " ";
    }
    out += "\"/>\n";
  }
  for (const auto & agent : scene.agents) {
    const auto & s = agent.states.at(frame);
    if (!s.valid) {
      continue;
    }
    const Vec2 c = to_local(ego.pose, s.pose.position());
    const double h = s.pose.heading - ego.pose.heading;
    const Vec2 u = unit_from_angle(h) * (0.5 * s.length);
    const Vec2 v = perp_left(unit_from_angle(h)) * (0.5 * s.width);
    out += "<polygon fill=\"#f4b183\" stroke=\"#c55a11\" points=\"" + px(c + u + v) + " " +
      px(c - u + v) + " " + px(c - u - v) + " " + px(c + u - v) + "\"/>\n";
  }
  auto path = [&](const Trajectory & t, const char * color) {
      out += std::string("<polyline fill=\"none\" stroke=\"") + color +
        "\" stroke-width=\"2\" points=\"" + px({0.0, 0.0});
      for (const auto & w : t.waypoints) {
        out += " " + px({w.x, w.y});
      }
      out += "\"/>\n";
    };
  path(gt, "#2e7d32");
  path(plan, "#1565c0");
  out += "<circle cx=\"200\" cy=\"500\" r=\"4\" fill=\"black\"/>\n</svg>\n";
  return out;
}

std::vector<ValidationResult> cmd_validate(const std::vector<std::string> & paths,
  std::size_t jobs)
{
  const auto files = expand_scene_paths(paths);
  return detail::ordered_map(files.size(), jobs, [&](std::size_t i) {
             ValidationResult r;
             r.path = files[i];
             try {
               load_scene_file(files[i]);
             } catch (const Error & e) {
               r.ok = false;
               r.code = e.code();
               r.message = e.what();
             }
             return r;
           });
}

std::string validation_to_jsonl(const std::vector<ValidationResult> & results)
{
  std::string out;
  for (const auto & r : results) {
    Json j = {{"path", r.path}, {"ok", r.ok}};
    if (!r.ok) {
      j["error"] = std::string(to_string(r.code));
      j["message"] = r.message;
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::string cmd_label(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::optional<std::string> & overrides_path, std::size_t jobs)
{
  std::vector<LabelOverride> overrides;
  if (overrides_path) {
    overrides = with_context(*overrides_path, [&] {
          return parse_label_sidecar(read_text_file(*overrides_path));
        });
  }
  const auto scenes = load_sorted(scene_paths, jobs);
  return join_lines(detail::ordered_map(scenes.size(), jobs, [&](std::size_t i) {
           return with_context(scenes[i].path, [&] {
             return labels_to_json(label_scene(scenes[i].scene, config.relations,
               config.interaction, overrides)) + "\n";
           });
         }));
}

std::string cmd_gen_qa(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::optional<std::string> & labels_path,
  const std::optional<std::string> & templates_path, std::size_t jobs)
{
  const QATemplates templates = templates_path ?
    with_context(*templates_path, [&] {return load_templates(read_text_file(*templates_path));}) :
    default_templates();
  std::map<std::string, SceneLabels> given;
  if (labels_path) {
    const std::string text = read_text_file(*labels_path);
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      auto labels = with_context(*labels_path + ":" + std::to_string(line_no), [&] {
            return labels_from_json(line);
          });
      const std::string id = labels.scene_id;
      given.insert_or_assign(id, std::move(labels));
    }
  }
  const auto scenes = load_sorted(scene_paths, jobs);
  const QAConfig qa = config.qa_config();
  return join_lines(detail::ordered_map(scenes.size(), jobs, [&](std::size_t i) {
           return with_context(scenes[i].path, [&] {
             const Scene & scene = scenes[i].scene;
             SceneLabels labels;
             if (labels_path) {
               const auto it = given.find(scene.id);
               if (it == given.end()) {
                 fail(ErrorCode::kRefError, "no labels for scene '" + scene.id + "'");
               }
               labels = it->second;
             } else {
               labels = label_scene(scene, config.relations, config.interaction);
             }
             std::string out;
             for (std::size_t f = 0; f < scene.frame_count(); ++f) {
               if (!scene.ego.states[f].valid) {
                 continue;
               }
               for (const auto & r : gen_frame_qas(scene, labels, f, templates, qa)) {
                 out += qa_record_to_json(r) + "\n";
               }
             }
             return out;
           });
         }));
}

CorpusManifest cmd_synth(const std::string & spec_path, const std::string & out_dir,
  const ToolkitConfig & config)
{
  const auto spec = with_context(spec_path, [&] {
        return parse_corpus_spec(read_text_file(spec_path));
      });
  const fs::path root(out_dir);
  auto manifest = synth_corpus(spec, config.seed, config.synth, [&](Scene && scene) {
        write_text_file((root / "scenes" / (safe_name(scene.id) + ".json")).string(),
          save_scene(scene));
      });
  write_text_file((root / "manifest.json").string(), manifest_to_json(manifest));
  return manifest;
}

std::size_t cmd_tokenize(const std::vector<std::string> & scene_paths,
  const ToolkitConfig & config, const std::string & out_dir, std::size_t jobs)
{
  const auto scenes = load_sorted(scene_paths, jobs);
  index_unique(scenes);
  const auto counts = detail::ordered_map(scenes.size(), jobs, [&](std::size_t i) {
        return with_context(scenes[i].path, [&] {
          const Scene & scene = scenes[i].scene;
          std::size_t n = 0;
          for (std::size_t f = 0; f < scene.frame_count(); ++f) {
            if (!scene.ego.states[f].valid) {
              continue;
            }
            const auto bytes = write_bundle(fixture_encode(scene, f, config.seed));
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "_f%04zu.tokb", f);
            write_text_file((fs::path(out_dir) / (safe_name(scene.id) + suffix)).string(),
              std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
            ++n;
          }
          return n;
        });
      });
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

namespace
{

Trajectory plan_or_fallback(PlannerKind kind, const Scene & scene, std::size_t frame,
  const PlannerConfig & config)
{
  try {
    return run_planner(kind, scene, frame, config);
  } catch (const Error & e) {
    if (e.code() != ErrorCode::kNoLane) {throw;}
    return constant_velocity_planner(scene, frame);
  }
}

}  // namespace

std::string cmd_plan(const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  std::size_t jobs)
{
  const auto scenes = load_sorted(scene_paths, jobs);
  index_unique(scenes);
  const PlannerConfig pc = config.effective_planner_config();
  return join_lines(detail::ordered_map(scenes.size(), jobs, [&](std::size_t i) {
           return with_context(scenes[i].path, [&] {
             const Scene & scene = scenes[i].scene;
             std::vector<EvalSample> plans;
             for (std::size_t f = 0; f < scene.frame_count(); ++f) {
               if (has_full_future(scene, f)) {
                 plans.push_back({scene.id, f, plan_or_fallback(config.planner, scene, f, pc)});
               }
             }
             return plans_to_jsonl(plans);
           });
         }));
}

Evaluation cmd_evaluate(const std::string & plan_path,
  const std::vector<std::string> & scene_paths, const ToolkitConfig & config,
  const std::string & out_dir, bool plots, std::size_t jobs)
{
  auto plans = with_context(plan_path, [&] {
        return parse_plans_jsonl(read_text_file(plan_path));
      });
  const auto scenes = load_sorted(scene_paths, jobs);
  const auto index = index_unique(scenes);
  std::map<std::pair<std::string, std::size_t>, Trajectory> by_key;
  if (plots) {
    for (const auto & p : plans) {
      by_key.emplace(std::pair{p.scene_id, p.frame}, p.plan);
    }
  }
  const Evaluation ev = with_context(plan_path, [&] {
        return evaluate_plans(std::move(plans), index, config.metrics);
      });
  const fs::path root(out_dir);
  write_text_file((root / "report.json").string(), evaluation_report_json(ev, config));
  write_text_file((root / "report.csv").string(), evaluation_report_csv(ev));
  if (plots) {
    detail::ordered_map(ev.samples.size(), jobs, [&](std::size_t i) {
        const auto & m = ev.samples[i];
        char name[32];
        std::snprintf(name, sizeof(name), "_f%04zu.svg", m.frame);
        write_text_file((root / "plots" / (safe_name(m.scene_id) + name)).string(),
          trajectory_svg(*index.at(m.scene_id), m.frame, by_key.at({m.scene_id, m.frame})));
        return 0;
      });
  }
  return ev;
}

}  // namespace drivelab
