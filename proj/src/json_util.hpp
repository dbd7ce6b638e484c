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

#include "drivelab/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <string_view>

namespace drivelab::json_util
{

using Json = nlohmann::json;

/// Rounds to 9 significant digits so the value survives a text round trip unchanged.
inline double canonical_real(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline const Json & field(const Json & obj, const char * key, const std::string & where)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorCode::kSchemaError, where + ": missing key '" + key + "'");
  }
  return *it;
}

inline void require_object(const Json & value, const std::string & where)
{
  if (!value.is_object()) {
    fail(ErrorCode::kSchemaError, where + ": expected an object");
  }
}

inline void require_array(const Json & value, const std::string & where)
{
  if (!value.is_array()) {
    fail(ErrorCode::kSchemaError, where + ": expected an array");
  }
}

inline void only_keys(const Json & obj, std::initializer_list<std::string_view> keys,
  const std::string & where)
{
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto k : keys) {
      known = known || it.key() == k;
    }
    if (!known) {
      fail(ErrorCode::kSchemaError, where + ": unexpected key '" + it.key() + "'");
    }
  }
}

inline double get_real(const Json & value, const std::string & where)
{
  if (!value.is_number()) {
    fail(ErrorCode::kSchemaError, where + ": expected a number");
  }
  const double v = value.get<double>();
  if (!std::isfinite(v)) {
    fail(ErrorCode::kSchemaError, where + ": non-finite number");
  }
  return v;
}

inline std::string get_string(const Json & value, const std::string & where)
{
  if (!value.is_string()) {
    fail(ErrorCode::kSchemaError, where + ": expected a string");
  }
  return value.get<std::string>();
}

inline bool get_bool(const Json & value, const std::string & where)
{
  if (!value.is_boolean()) {
    fail(ErrorCode::kSchemaError, where + ": expected a boolean");
  }
  return value.get<bool>();
}

inline Json parse(std::string_view text, const std::string & where)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error & e) {
    fail(ErrorCode::kSchemaError, where + ": " + e.what());
  }
}

}  // namespace drivelab::json_util
