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

#include "drivelab/scene.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

namespace drivelab
{
namespace
{

using testing::error_code_of;
using testing::straight_scene;

Scene two_lane_scene()
{
  Scene s = testing::right_lane_overtake_scene();
  s.scenario_tag = ScenarioTag::kNominal;
  return s;
}

TEST(SceneIo, CanonicalFormIsStable)
{
  const Scene s = two_lane_scene();
  const std::string text = save_scene(s);
  const Scene back = load_scene(text);
  EXPECT_EQ(save_scene(back), text);
  EXPECT_EQ(load_scene(save_scene(back)), back);
}

TEST(SceneIo, RealsKeepNineSignificantDigits)
{
  const Scene s = two_lane_scene();
  const Scene back = load_scene(save_scene(s));
  for (std::size_t f = 0; f < s.frame_count(); ++f) {
    const auto & a = s.ego.states[f];
    const auto & b = back.ego.states[f];
    EXPECT_NEAR(b.pose.y, a.pose.y, 1e-8 * (1.0 + std::abs(a.pose.y)));
    EXPECT_NEAR(b.speed, a.speed, 1e-8 * (1.0 + std::abs(a.speed)));
  }
}

TEST(SceneIo, OutputKeysAreSorted)
{
  const auto doc = nlohmann::json::parse(save_scene(straight_scene(3)));
  std::string previous;
  for (const auto & [key, value] : doc.items()) {
    EXPECT_LT(previous, key);
    previous = key;
  }
  EXPECT_TRUE(doc.at("scenario_tag").is_null());
}

TEST(SceneIo, UnknownKeyIsSchemaError)
{
  auto doc = nlohmann::json::parse(save_scene(straight_scene(3)));
  doc["weather"] = "rain";
  EXPECT_EQ(error_code_of([&] {load_scene(doc.dump());}), ErrorCode::kSchemaError);
}

TEST(SceneIo, MalformedJsonIsSchemaError)
{
  EXPECT_EQ(error_code_of([] {load_scene("{\"id\": ");}), ErrorCode::kSchemaError);
  EXPECT_EQ(error_code_of([] {load_scene("[]");}), ErrorCode::kSchemaError);
}

TEST(SceneIo, UnknownEnumNameIsRejected)
{
  auto doc = nlohmann::json::parse(save_scene(straight_scene(3)));
  doc["nav_commands"][0] = "FLY";
  EXPECT_NE(error_code_of([&] {load_scene(doc.dump());}), ErrorCode::kOk);
}

TEST(SceneIo, MissingFileIsIoError)
{
  EXPECT_EQ(error_code_of([] {load_scene_file("/nonexistent/scene.json");}), ErrorCode::kIoError);
}

TEST(SceneValidation, AcceptsWellFormedScene)
{
  EXPECT_EQ(error_code_of([] {validate_scene(two_lane_scene());}), ErrorCode::kOk);
}

TEST(SceneValidation, EmptyIdIsSchemaError)
{
  Scene s = straight_scene(4);
  s.id.clear();
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kSchemaError);
}

TEST(SceneValidation, NonPositiveRateIsSchemaError)
{
  Scene s = straight_scene(4);
  s.frame_rate_hz = 0.0;
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kSchemaError);
}

TEST(SceneValidation, DanglingNeighbourIsRefError)
{
  Scene s = straight_scene(4);
  s.lanes[0].left_neighbor = "missing";
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kRefError);
}

TEST(SceneValidation, DanglingSuccessorIsRefError)
{
  Scene s = straight_scene(4);
  s.lanes[0].successors.push_back("missing");
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kRefError);
}

TEST(SceneValidation, TrackLengthMismatchIsLengthError)
{
  Scene s = two_lane_scene();
  s.agents[0].states.pop_back();
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kLengthError);
}

TEST(SceneValidation, NavCommandLengthMismatchIsLengthError)
{
  Scene s = straight_scene(4);
  s.nav_commands.push_back(NavCommand::kKeepForward);
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kLengthError);
}

TEST(SceneValidation, DuplicateLaneIdIsRejected)
{
  Scene s = straight_scene(4);
  s.lanes.push_back(s.lanes[0]);
  EXPECT_NE(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(SceneValidation, AgentIdEqualToEgoIsRejected)
{
  Scene s = two_lane_scene();
  s.agents[0].id = s.ego.id;
  EXPECT_NE(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(SceneValidation, NonFiniteStateIsRejected)
{
  Scene s = two_lane_scene();
  s.agents[0].states[3].pose.x = std::nan("");
  EXPECT_NE(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(SceneValidation, DegenerateCenterlineIsRejected)
{
  Scene s = straight_scene(4);
  s.lanes[0].centerline = {{1.0, 1.0}, {1.0, 1.0}};
  EXPECT_NE(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(SceneValidation, InvalidEgoStateIsRejected)
{
  Scene s = straight_scene(4);
  s.ego.states[2].valid = false;
  EXPECT_NE(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(SceneValidation, InvalidAgentStatesNeedNoSize)
{
  Scene s = two_lane_scene();
  s.agents[0].states[5] = AgentState{};
  EXPECT_EQ(error_code_of([&] {validate_scene(s);}), ErrorCode::kOk);
}

TEST(Frames, LocalAndGlobalAreInverse)
{
  const Pose2 origin{12.0, -3.0, 2.1};
  const Vec2 p{-4.5, 17.25};
  const Vec2 local = to_local(origin, p);
  const Vec2 back = to_global(origin, local);
  EXPECT_NEAR(back.x, p.x, 1e-12);
  EXPECT_NEAR(back.y, p.y, 1e-12);
}

TEST(Frames, LocalAxesPointForwardAndLeft)
{
  const Pose2 origin{1.0, 1.0, std::numbers::pi / 2};
  const Vec2 ahead = to_local(origin, {1.0, 3.0});
  EXPECT_NEAR(ahead.x, 2.0, 1e-12);
  EXPECT_NEAR(ahead.y, 0.0, 1e-12);
  const Vec2 left = to_local(origin, {-1.0, 1.0});
  EXPECT_NEAR(left.x, 0.0, 1e-12);
  EXPECT_NEAR(left.y, 2.0, 1e-12);
}

TEST(Enums, NamesRoundTrip)
{
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    const auto value = static_cast<Category>(c);
    EXPECT_EQ(parse_category(to_string(value)), value);
  }
  for (int n = 0; n <= static_cast<int>(NavCommand::kThreePointTurnRight); ++n) {
    const auto value = static_cast<NavCommand>(n);
    EXPECT_EQ(parse_nav_command(to_string(value)), value);
  }
  for (int t = 0; t <= static_cast<int>(ScenarioTag::kNominal); ++t) {
    const auto value = static_cast<ScenarioTag>(t);
    EXPECT_EQ(parse_scenario_tag(to_string(value)), value);
  }
  EXPECT_NE(error_code_of([] {parse_category("SPACESHIP");}), ErrorCode::kOk);
}

TEST(Enums, HeadingFreeCategories)
{
  EXPECT_TRUE(is_heading_free(Category::kPedestrian));
  EXPECT_TRUE(is_heading_free(Category::kTrafficCone));
  EXPECT_TRUE(is_heading_free(Category::kBarrier));
  EXPECT_FALSE(is_heading_free(Category::kCar));
  EXPECT_TRUE(is_vehicle(Category::kBus));
  EXPECT_FALSE(is_vehicle(Category::kPedestrian));
}

TEST(Headings, WaypointHeadingsFollowSegments)
{
  Trajectory t;
  t.waypoints = {{0.5, 0.0, 0.0}, {1.0, 1.0, 0.0}, {1.5, 1.0, 1.0}, {2.0, 1.0, 1.0}};
  const auto h = headings_from_waypoints(t, 0.25);
  ASSERT_EQ(h.size(), 4U);
  EXPECT_NEAR(h[0], 0.0, 1e-12);
  EXPECT_NEAR(h[1], std::numbers::pi / 2, 1e-12);
  // A segment that does not move keeps the previous heading, and so does the last waypoint.
  EXPECT_NEAR(h[2], std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(h[3], std::numbers::pi / 2, 1e-12);
}

}  // namespace
}  // namespace drivelab
