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

#include "drivelab/config.hpp"
#include "drivelab/pipeline.hpp"
#include "drivelab/planners.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace drivelab
{
namespace
{

using testing::error_code_of;
using testing::TempDir;

TEST(Config, DefaultsSerializeAndReload)
{
  const ToolkitConfig defaults;
  const std::string text = config_to_json(defaults);
  const auto doc = nlohmann::json::parse(text);
  for (const char * section : {"lane", "relations", "interaction", "metrics", "qa", "planner",
      "synth"})
  {
    EXPECT_TRUE(doc.contains(section)) << section;
  }
  EXPECT_EQ(config_to_json(merge_config_json(defaults, text)), text);
}

TEST(Config, PartialMergeKeepsOtherValues)
{
  const auto c = merge_config_json({}, R"({"metrics": {"w_lon": 3.5}, "seed": 9})");
  EXPECT_EQ(c.metrics.w_lon, 3.5);
  EXPECT_EQ(c.metrics.grounding_gate, 2.0);
  EXPECT_EQ(c.seed, 9U);
}

TEST(Config, UnknownKeysAndBadTypes)
{
  EXPECT_EQ(error_code_of([] {merge_config_json({}, R"({"metrix": {}})");}),
    ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] {merge_config_json({}, R"({"metrics": {"w_lon": "big"}})");}),
    ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] {merge_config_json({}, R"({"metrics": {"w_lon": -1}})");}),
    ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] {merge_config_json({}, "not json");}), ErrorCode::kConfigError);
}

TEST(Config, DottedSet)
{
  auto c = config_set({}, "planner.kind", "lane_follow");
  EXPECT_EQ(c.planner, PlannerKind::kLaneFollow);
  c = config_set(c, "planner.target_speed", "4.5");
  EXPECT_EQ(c.planner_config.target_speed, 4.5);
  c = config_set(c, "lane.margin", "0.75");
  EXPECT_EQ(c.effective_planner_config().lane.margin, 0.75);
  EXPECT_EQ(error_code_of([&] {config_set(c, "lane.nope", "1");}), ErrorCode::kConfigError);
}

TEST(Config, QaConfigCarriesSeed)
{
  ToolkitConfig c;
  c.seed = 77;
  c.perception_distractors = 3;
  EXPECT_EQ(c.qa_config().seed, 77U);
  EXPECT_EQ(c.qa_config().perception_distractors, 3U);
}

TEST(Paths, DirectoriesExpandToSortedJson)
{
  TempDir dir("paths");
  write_text_file(dir.file("b.json"), "{}");
  write_text_file(dir.file("a.json"), "{}");
  write_text_file(dir.file("notes.txt"), "x");
  const auto paths = expand_scene_paths({dir.path(), dir.file("a.json")});
  ASSERT_EQ(paths.size(), 2U);
  EXPECT_LT(paths[0], paths[1]);
  EXPECT_NE(paths[0].find("a.json"), std::string::npos);
}

TEST(Files, WriteCreatesParents)
{
  TempDir dir("files");
  write_text_file(dir.file("x/y/z.txt"), "hello");
  EXPECT_EQ(read_text_file(dir.file("x/y/z.txt")), "hello");
  EXPECT_EQ(error_code_of([&] {read_text_file(dir.file("missing"));}), ErrorCode::kIoError);
}

TEST(PlanFile, RoundTrip)
{
  const Scene s = testing::straight_scene(20);
  std::vector<EvalSample> plans;
  for (std::size_t f = 0; f < 5; ++f) {plans.push_back({s.id, f, replay_planner(s, f)});}
  const auto back = parse_plans_jsonl(plans_to_jsonl(plans));
  ASSERT_EQ(back.size(), plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    EXPECT_EQ(back[i].scene_id, plans[i].scene_id);
    EXPECT_EQ(back[i].frame, plans[i].frame);
    EXPECT_EQ(back[i].plan, plans[i].plan);
  }
}

TEST(PlanFile, Errors)
{
  const std::string good =
    R"({"scene_id": "s", "frame": 0, "waypoints": [[1,0],[2,0],[3,0],[4,0],[5,0],[6,0]]})";
  EXPECT_EQ(error_code_of([&] {parse_plans_jsonl(good + "\n" + good + "\n");}),
    ErrorCode::kFormatError);
  EXPECT_EQ(error_code_of([] {
      parse_plans_jsonl(R"({"scene_id": "s", "frame": 0, "waypoints": [[1,0]]})");
    }), ErrorCode::kAlignError);
  EXPECT_EQ(error_code_of([] {parse_plans_jsonl("{broken");}), ErrorCode::kFormatError);
  EXPECT_EQ(parse_plans_jsonl(good + "\n\n").size(), 1U);
}

class CorpusFixture : public ::testing::Test
{
protected:
  void SetUp() override
  {
    write_text_file(dir.file("spec.json"), R"({"NOMINAL": 2, "OVERTAKE_ONCOMING": 1})");
    manifest = cmd_synth(dir.file("spec.json"), dir.file("out"), config);
    scenes = {dir.file("out/scenes")};
  }

  TempDir dir{"pipeline"};
  ToolkitConfig config;
  CorpusManifest manifest;
  std::vector<std::string> scenes;
};

TEST_F(CorpusFixture, SynthWritesScenesAndManifest)
{
  EXPECT_EQ(manifest.total, 3U);
  EXPECT_EQ(expand_scene_paths(scenes).size(), 3U);
  EXPECT_TRUE(std::filesystem::exists(dir.file("out/manifest.json")));
  for (const auto & r : cmd_validate(scenes)) {EXPECT_TRUE(r.ok) << r.message;}
}

TEST_F(CorpusFixture, ValidateReportsBrokenFile)
{
  write_text_file(dir.file("out/scenes/zz_broken.json"), R"({"id": ""})");
  const auto results = cmd_validate(scenes);
  ASSERT_EQ(results.size(), 4U);
  EXPECT_FALSE(results.back().ok);
  EXPECT_EQ(results.back().code, ErrorCode::kSchemaError);
  EXPECT_NE(validation_to_jsonl(results).find("SCHEMA_ERROR"), std::string::npos);
}

TEST_F(CorpusFixture, LabelsFeedQa)
{
  const std::string labels = cmd_label(scenes, config, std::nullopt, 2);
  std::istringstream lines(labels);
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    EXPECT_NO_THROW(labels_from_json(line));
    ++count;
  }
  EXPECT_EQ(count, 3U);
  write_text_file(dir.file("labels.jsonl"), labels);
  EXPECT_EQ(cmd_gen_qa(scenes, config, dir.file("labels.jsonl"), std::nullopt, 2),
    cmd_gen_qa(scenes, config, std::nullopt, std::nullopt, 1));
}

TEST_F(CorpusFixture, QaNeedsLabelsForEveryScene)
{
  const std::string labels = cmd_label(scenes, config, std::nullopt);
  write_text_file(dir.file("partial.jsonl"), labels.substr(0, labels.find('\n') + 1));
  EXPECT_EQ(error_code_of([&] {
      cmd_gen_qa(scenes, config, dir.file("partial.jsonl"), std::nullopt);
    }), ErrorCode::kRefError);
}

TEST_F(CorpusFixture, OverridesSidecar)
{
  const std::string sidecar = R"([{"scene_id": "nominal_000001", "agent_id": "car_0",
    "kind": "YIELD_TO_VEHICLE", "start": 1, "end": 2}])";
  write_text_file(dir.file("overrides.json"), sidecar);
  const std::string labels = cmd_label(scenes, config, dir.file("overrides.json"));
  EXPECT_NE(labels.find("YIELD_TO_VEHICLE"), std::string::npos);
}

TEST_F(CorpusFixture, TokenizeWritesBundles)
{
  const std::size_t n = cmd_tokenize(scenes, config, dir.file("tokens"), 2);
  EXPECT_EQ(n, 3U * config.synth.frames);
  std::size_t files = 0;
  for (const auto & e : std::filesystem::directory_iterator(dir.file("tokens"))) {
    files += e.path().extension() == ".tokb" ? 1 : 0;
  }
  EXPECT_EQ(files, n);
}

TEST_F(CorpusFixture, PlanAndEvaluate)
{
  ToolkitConfig cv = config;
  cv.planner = PlannerKind::kConstantVelocity;
  write_text_file(dir.file("plans.jsonl"), cmd_plan(scenes, cv, 2));
  const auto ev = cmd_evaluate(dir.file("plans.jsonl"), scenes, config, dir.file("eval"), true);
  EXPECT_EQ(ev.overall.n_samples, 3U * (config.synth.frames - 6));
  EXPECT_GT(ev.overall.l2.ave_all, 0.0);
  const auto report = nlohmann::json::parse(read_text_file(dir.file("eval/report.json")));
  EXPECT_TRUE(report.contains("config"));
  EXPECT_TRUE(report.contains("by_scenario"));
  const std::string csv = read_text_file(dir.file("eval/report.csv"));
  EXPECT_EQ(csv.rfind("scope,n_samples,n_masked,", 0), 0U);
  EXPECT_NE(csv.find("\noverall,"), std::string::npos);
  EXPECT_NE(csv.find("\nNOMINAL,"), std::string::npos);
  std::size_t plots = 0;
  for (const auto & e : std::filesystem::directory_iterator(dir.file("eval/plots"))) {
    plots += e.path().extension() == ".svg" ? 1 : 0;
  }
  EXPECT_EQ(plots, ev.samples.size());
}

TEST_F(CorpusFixture, EvaluateRejectsUnknownScene)
{
  write_text_file(dir.file("plans.jsonl"),
    R"({"scene_id": "ghost", "frame": 0, "waypoints": [[1,0],[2,0],[3,0],[4,0],[5,0],[6,0]]})");
  EXPECT_EQ(error_code_of([&] {
      cmd_evaluate(dir.file("plans.jsonl"), scenes, config, dir.file("eval"), false);
    }), ErrorCode::kRefError);
}

TEST(Svg, ContainsPlanAndTruth)
{
  const Scene s = testing::right_lane_overtake_scene();
  const std::string svg = trajectory_svg(s, 4, replay_planner(s, 4));
  EXPECT_EQ(svg.rfind("<svg", 0), 0U);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}

}  // namespace
}  // namespace drivelab
