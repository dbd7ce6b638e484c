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

#include "drivelab/error.hpp"

namespace drivelab
{

std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::kOk: return "OK";
    case ErrorCode::kSchemaError: return "SCHEMA_ERROR";
    case ErrorCode::kRefError: return "REF_ERROR";
    case ErrorCode::kLengthError: return "LENGTH_ERROR";
    case ErrorCode::kTopologyCycle: return "TOPOLOGY_CYCLE";
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kInsufficientFuture: return "INSUFFICIENT_FUTURE";
    case ErrorCode::kFormatError: return "FORMAT_ERROR";
    case ErrorCode::kMagicError: return "MAGIC_ERROR";
    case ErrorCode::kVersionError: return "VERSION_ERROR";
    case ErrorCode::kTruncated: return "TRUNCATED";
    case ErrorCode::kAlignError: return "ALIGN_ERROR";
    case ErrorCode::kNoLane: return "NO_LANE";
    case ErrorCode::kParamError: return "PARAM_ERROR";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kConfigError: return "CONFIG_ERROR";
    case ErrorCode::kInternal: return "INTERNAL";
  }
  return "UNKNOWN";
}

void fail(ErrorCode code, const std::string & message)
{
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace drivelab
