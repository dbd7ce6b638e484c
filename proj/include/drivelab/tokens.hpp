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

#include "drivelab/scene.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drivelab
{

inline constexpr std::size_t kTrackTokenWidth = 256;
inline constexpr std::size_t kMotionTokenWidth = 256;
inline constexpr std::size_t kMapTokenWidth = 256;
inline constexpr std::size_t kSceneTokenWidth = 256;
inline constexpr std::size_t kAgentTokenWidth = kTrackTokenWidth + kMotionTokenWidth;

using TrackToken = std::array<float, kTrackTokenWidth>;
using MotionToken = std::array<float, kMotionTokenWidth>;
using MapToken = std::array<float, kMapTokenWidth>;
using SceneToken = std::array<float, kSceneTokenWidth>;
using AgentToken = std::array<float, kAgentTokenWidth>;

/// Track components first, then motion. Throws kLengthError unless both are 256 wide.
AgentToken concat_agent_token(std::span<const float> track, std::span<const float> motion);

struct AgentTokenEntry
{
  std::uint64_t id{0};
  AgentToken token{};
  friend bool operator==(const AgentTokenEntry &, const AgentTokenEntry &) = default;
};

struct MapTokenEntry
{
  std::uint64_t id{0};
  MapToken token{};
  friend bool operator==(const MapTokenEntry &, const MapTokenEntry &) = default;
};

struct TokenBundle
{
  std::string scene_id;
  std::uint32_t frame{0};
  float frame_rate_hz{2.0F};
  std::vector<AgentTokenEntry> agent_tokens;
  std::vector<MapTokenEntry> map_tokens;
  std::vector<SceneToken> scene_tokens;  // optional unstructured tokens

  friend bool operator==(const TokenBundle &, const TokenBundle &) = default;
};

/// 64-bit FNV-1a, used to turn string identifiers into token ids.
std::uint64_t token_id(std::string_view id);

/// Slot layout of the fixture encoder. Agent attributes live in the track half, expressed in
/// the ego frame of the encoded frame; everything else is seeded noise in [-1, 1).
namespace fixture_slots
{
inline constexpr std::size_t kX = 0;
inline constexpr std::size_t kY = 1;
inline constexpr std::size_t kHeading = 2;
inline constexpr std::size_t kSpeed = 3;
inline constexpr std::size_t kLength = 4;
inline constexpr std::size_t kWidth = 5;
inline constexpr std::size_t kCategoryOneHot = 6;   // 9 slots
inline constexpr std::size_t kMapStartX = 0;
inline constexpr std::size_t kMapStartY = 1;
inline constexpr std::size_t kMapEndX = 2;
inline constexpr std::size_t kMapEndY = 3;
inline constexpr std::size_t kMapSemanticOneHot = 4;  // 3 slots
}  // namespace fixture_slots

TokenBundle fixture_encode(const Scene & scene, std::size_t frame, std::uint64_t seed);

struct DecodedAgent
{
  std::uint64_t id{0};
  float x{0};
  float y{0};
  float heading{0};
  float speed{0};
  float length{0};
  float width{0};
  Category category{Category::kOther};
  friend bool operator==(const DecodedAgent &, const DecodedAgent &) = default;
};

struct DecodedMapElement
{
  std::uint64_t id{0};
  float start_x{0};
  float start_y{0};
  float end_x{0};
  float end_y{0};
  LaneSemantic semantic{LaneSemantic::kNormal};
  friend bool operator==(const DecodedMapElement &, const DecodedMapElement &) = default;
};

struct DecodedBundle
{
  std::vector<DecodedAgent> agents;
  std::vector<DecodedMapElement> map_elements;
};

/// Reads the designated slots back. Throws kFormatError when a one-hot block is malformed.
DecodedBundle fixture_decode(const TokenBundle & bundle);

/// Decodes raw token rows; throws kFormatError unless widths are 512 (agents) and 256 (map).
DecodedAgent fixture_decode_agent(std::uint64_t id, std::span<const float> token);
DecodedMapElement fixture_decode_map(std::uint64_t id, std::span<const float> token);

inline constexpr char kBundleMagic[4] = {'T', 'O', 'K', 'B'};
inline constexpr std::uint16_t kBundleVersion = 1;
inline constexpr std::size_t kBundleHeaderSize = 28;

std::vector<std::uint8_t> write_bundle(const TokenBundle & bundle);
void write_bundle(const TokenBundle & bundle, std::ostream & sink);
/// Throws kMagicError, kVersionError, kTruncated or kFormatError.
TokenBundle read_bundle(std::span<const std::uint8_t> bytes);
TokenBundle read_bundle(std::istream & source);

}  // namespace drivelab
