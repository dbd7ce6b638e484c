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

#include "drivelab/tokens.hpp"

#include "drivelab/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <set>

namespace drivelab
{

namespace
{

// Top 24 bits of a 64-bit draw scaled to [-1, 1); exact in float on every platform.
float noise(std::mt19937_64 & rng)
{
  const auto bits = static_cast<float>(rng() >> 40);
  return bits * 0x1p-23F - 1.0F;
}

std::mt19937_64 bundle_rng(const std::string & scene_id, std::size_t frame, std::uint64_t seed)
{
  std::uint64_t mixed = seed ^ token_id(scene_id);
  mixed ^= 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(frame) + 1);
  return std::mt19937_64(mixed);
}

class ByteWriter
{
public:
  explicit ByteWriter(std::vector<std::uint8_t> & out)
  : out_(out) {}

  void u16(std::uint16_t v)
  {
    for (int i = 0; i < 2; ++i) {out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));}
  }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i) {out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));}
  }
  void u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i) {out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));}
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const void * data, std::size_t n)
  {
    const auto * p = static_cast<const std::uint8_t *>(data);
    out_.insert(out_.end(), p, p + n);
  }

private:
  std::vector<std::uint8_t> & out_;
};

class ByteReader
{
public:
  explicit ByteReader(std::span<const std::uint8_t> in)
  : in_(in) {}

  void need(std::size_t n, const char * what) const
  {
    if (in_.size() - pos_ < n) {
      fail(ErrorCode::kTruncated, std::string("bundle ends inside ") + what);
    }
  }
  std::uint64_t le(std::size_t n)
  {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += n;
    return v;
  }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }
  std::span<const std::uint8_t> take(std::size_t n)
  {
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_{0};
};

template <std::size_t N>
void read_floats(ByteReader & r, std::array<float, N> & out, const char * what)
{
  r.need(4 * N, what);
  for (auto & v : out) {
    v = r.f32();
    if (!std::isfinite(v)) {
      fail(ErrorCode::kFormatError, std::string("non-finite component in ") + what);
    }
  }
}

template <typename Range>
void check_finite(const Range & values, const char * what)
{
  for (const float v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kFormatError, std::string("non-finite component in ") + what);
    }
  }
}

template <std::size_t N>
std::size_t one_hot_index(std::span<const float> slots, const char * what)
{
  std::size_t hot = N;
  for (std::size_t i = 0; i < N; ++i) {
    if (slots[i] == 1.0F && hot == N) {
      hot = i;
    } else if (slots[i] != 0.0F) {
      fail(ErrorCode::kFormatError, std::string("malformed one-hot block for ") + what);
    }
  }
  if (hot == N) {
    fail(ErrorCode::kFormatError, std::string("empty one-hot block for ") + what);
  }
  return hot;
}

void check_unique_ids(const TokenBundle & bundle)
{
  std::set<std::uint64_t> agents;
  for (const auto & e : bundle.agent_tokens) {
    if (!agents.insert(e.id).second) {
      fail(ErrorCode::kFormatError, "duplicate agent token id " + std::to_string(e.id));
    }
  }
  std::set<std::uint64_t> maps;
  for (const auto & e : bundle.map_tokens) {
    if (!maps.insert(e.id).second) {
      fail(ErrorCode::kFormatError, "duplicate map token id " + std::to_string(e.id));
    }
  }
}

}  // namespace

AgentToken concat_agent_token(std::span<const float> track, std::span<const float> motion)
{
  if (track.size() != kTrackTokenWidth || motion.size() != kMotionTokenWidth) {
    fail(ErrorCode::kLengthError, "track and motion tokens must be 256 wide, got " +
      std::to_string(track.size()) + " and " + std::to_string(motion.size()));
  }
  AgentToken out{};
  std::copy(track.begin(), track.end(), out.begin());
  std::copy(motion.begin(), motion.end(), out.begin() + kTrackTokenWidth);
  return out;
}

std::uint64_t token_id(std::string_view id)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : id) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

TokenBundle fixture_encode(const Scene & scene, std::size_t frame, std::uint64_t seed)
{
  if (frame >= scene.frame_count()) {
    fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(frame) + " out of range");
  }
  namespace slot = fixture_slots;
  TokenBundle bundle;
  bundle.scene_id = scene.id;
  bundle.frame = static_cast<std::uint32_t>(frame);
  bundle.frame_rate_hz = static_cast<float>(scene.frame_rate_hz);
  auto rng = bundle_rng(scene.id, frame, seed);
  const Pose2 & ego = scene.ego.states[frame].pose;

  for (const auto & agent : scene.agents) {
    const auto & s = agent.states[frame];
    if (!s.valid) {
      continue;
    }
    TrackToken track{};
    MotionToken motion{};
    for (auto & v : track) {v = noise(rng);}
    for (auto & v : motion) {v = noise(rng);}
    const Vec2 local = to_local(ego, s.pose.position());
    track[slot::kX] = static_cast<float>(local.x);
    track[slot::kY] = static_cast<float>(local.y);
    track[slot::kHeading] = static_cast<float>(wrap_angle(s.pose.heading - ego.heading));
    track[slot::kSpeed] = static_cast<float>(s.speed);
    track[slot::kLength] = static_cast<float>(s.length);
    track[slot::kWidth] = static_cast<float>(s.width);
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      track[slot::kCategoryOneHot + c] = c == static_cast<std::size_t>(agent.category) ? 1.0F : 0.0F;
    }
    bundle.agent_tokens.push_back({token_id(agent.id), concat_agent_token(track, motion)});
  }

  for (const auto & lane : scene.lanes) {
    MapToken token{};
    for (auto & v : token) {v = noise(rng);}
    const Vec2 start = to_local(ego, lane.centerline.front());
    const Vec2 end = to_local(ego, lane.centerline.back());
    token[slot::kMapStartX] = static_cast<float>(start.x);
    token[slot::kMapStartY] = static_cast<float>(start.y);
    token[slot::kMapEndX] = static_cast<float>(end.x);
    token[slot::kMapEndY] = static_cast<float>(end.y);
    for (std::size_t c = 0; c < kLaneSemanticCount; ++c) {
      token[slot::kMapSemanticOneHot + c] =
        c == static_cast<std::size_t>(lane.semantic) ? 1.0F : 0.0F;
    }
    bundle.map_tokens.push_back({token_id(lane.id), token});
  }
  check_unique_ids(bundle);
  return bundle;
}

DecodedAgent fixture_decode_agent(std::uint64_t id, std::span<const float> token)
{
  namespace slot = fixture_slots;
  if (token.size() != kAgentTokenWidth) {
    fail(ErrorCode::kFormatError, "agent token must be 512 wide, got " + std::to_string(token.size()));
  }
  DecodedAgent a;
  a.id = id;
  a.x = token[slot::kX];
  a.y = token[slot::kY];
  a.heading = token[slot::kHeading];
  a.speed = token[slot::kSpeed];
  a.length = token[slot::kLength];
  a.width = token[slot::kWidth];
  a.category = static_cast<Category>(one_hot_index<kCategoryCount>(
      token.subspan(slot::kCategoryOneHot, kCategoryCount), "category"));
  return a;
}

DecodedMapElement fixture_decode_map(std::uint64_t id, std::span<const float> token)
{
  namespace slot = fixture_slots;
  if (token.size() != kMapTokenWidth) {
    fail(ErrorCode::kFormatError, "map token must be 256 wide, got " + std::to_string(token.size()));
  }
  DecodedMapElement m;
  m.id = id;
  m.start_x = token[slot::kMapStartX];
  m.start_y = token[slot::kMapStartY];
  m.end_x = token[slot::kMapEndX];
  m.end_y = token[slot::kMapEndY];
  m.semantic = static_cast<LaneSemantic>(one_hot_index<kLaneSemanticCount>(
      token.subspan(slot::kMapSemanticOneHot, kLaneSemanticCount), "lane semantic"));
  return m;
}

DecodedBundle fixture_decode(const TokenBundle & bundle)
{
  DecodedBundle out;
  for (const auto & e : bundle.agent_tokens) {
    out.agents.push_back(fixture_decode_agent(e.id, e.token));
  }
  for (const auto & e : bundle.map_tokens) {
    out.map_elements.push_back(fixture_decode_map(e.id, e.token));
  }
  return out;
}

std::vector<std::uint8_t> write_bundle(const TokenBundle & bundle)
{
  if (bundle.scene_id.size() > 0xFFFF) {
    fail(ErrorCode::kFormatError, "scene id longer than 65535 bytes");
  }
  check_unique_ids(bundle);
  check_finite(std::array<float, 1>{bundle.frame_rate_hz}, "frame rate");
  std::vector<std::uint8_t> out;
  out.reserve(kBundleHeaderSize + bundle.scene_id.size() +
    bundle.agent_tokens.size() * (8 + 4 * kAgentTokenWidth) +
    bundle.map_tokens.size() * (8 + 4 * kMapTokenWidth) +
    bundle.scene_tokens.size() * 4 * kSceneTokenWidth);
  ByteWriter w(out);
  w.bytes(kBundleMagic, 4);
  w.u16(kBundleVersion);
  w.u16(static_cast<std::uint16_t>(bundle.scene_id.size()));
  w.f32(bundle.frame_rate_hz);
  w.u32(bundle.frame);
  w.u32(static_cast<std::uint32_t>(bundle.agent_tokens.size()));
  w.u32(static_cast<std::uint32_t>(bundle.map_tokens.size()));
  w.u32(static_cast<std::uint32_t>(bundle.scene_tokens.size()));
  w.bytes(bundle.scene_id.data(), bundle.scene_id.size());
  for (const auto & e : bundle.agent_tokens) {
    check_finite(e.token, "agent token");
    w.u64(e.id);
    for (const float v : e.token) {w.f32(v);}
  }
  for (const auto & e : bundle.map_tokens) {
    check_finite(e.token, "map token");
    w.u64(e.id);
    for (const float v : e.token) {w.f32(v);}
  }
  for (const auto & t : bundle.scene_tokens) {
    check_finite(t, "scene token");
    for (const float v : t) {w.f32(v);}
  }
  return out;
}

void write_bundle(const TokenBundle & bundle, std::ostream & sink)
{
  const auto bytes = write_bundle(bundle);
  sink.write(reinterpret_cast<const char *>(bytes.data()),
    static_cast<std::streamsize>(bytes.size()));
  if (!sink) {
    fail(ErrorCode::kIoError, "failed writing token bundle");
  }
}

TokenBundle read_bundle(std::span<const std::uint8_t> bytes)
{
  ByteReader r(bytes);
  r.need(4, "magic");
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kBundleMagic, 4) != 0) {
    fail(ErrorCode::kMagicError, "not a TOKB bundle");
  }
  r.need(2, "version");
  const auto version = static_cast<std::uint16_t>(r.le(2));
  if (version != kBundleVersion) {
    fail(ErrorCode::kVersionError, "unsupported bundle version " + std::to_string(version));
  }
  r.need(kBundleHeaderSize - 6, "header");
  TokenBundle b;
  const auto id_len = static_cast<std::size_t>(r.le(2));
  b.frame_rate_hz = r.f32();
  b.frame = static_cast<std::uint32_t>(r.le(4));
  const auto n_agents = static_cast<std::size_t>(r.le(4));
  const auto n_map = static_cast<std::size_t>(r.le(4));
  const auto n_scene = static_cast<std::size_t>(r.le(4));
  if (!std::isfinite(b.frame_rate_hz)) {
    fail(ErrorCode::kFormatError, "non-finite frame rate");
  }
  r.need(id_len, "scene id");
  const auto id = r.take(id_len);
  b.scene_id.assign(id.begin(), id.end());

  // Validate the declared sizes before allocating anything.
  const std::size_t body = n_agents * (8 + 4 * kAgentTokenWidth) +
    n_map * (8 + 4 * kMapTokenWidth) + n_scene * 4 * kSceneTokenWidth;
  r.need(body, "token payload");
  b.agent_tokens.resize(n_agents);
  for (auto & e : b.agent_tokens) {
    e.id = r.le(8);
    read_floats(r, e.token, "agent token");
  }
  b.map_tokens.resize(n_map);
  for (auto & e : b.map_tokens) {
    e.id = r.le(8);
    read_floats(r, e.token, "map token");
  }
  b.scene_tokens.resize(n_scene);
  for (auto & t : b.scene_tokens) {
    read_floats(r, t, "scene token");
  }
  if (r.remaining() != 0) {
    fail(ErrorCode::kFormatError, std::to_string(r.remaining()) + " trailing bytes after bundle");
  }
  check_unique_ids(b);
  return b;
}

TokenBundle read_bundle(std::istream & source)
{
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source),
    std::istreambuf_iterator<char>()};
  return read_bundle(bytes);
}

}  // namespace drivelab
