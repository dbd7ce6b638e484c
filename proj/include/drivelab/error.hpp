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

#include <stdexcept>
#include <string>
#include <string_view>

namespace drivelab
{

// Values mirror dl_status in drivelab.h; keep both in sync.
enum class ErrorCode : int {
  kOk = 0,
  kSchemaError = 1,
  kRefError = 2,
  kLengthError = 3,
  kTopologyCycle = 4,
  kDegenerate = 5,
  kInsufficientFuture = 6,
  kFormatError = 7,
  kMagicError = 8,
  kVersionError = 9,
  kTruncated = 10,
  kAlignError = 11,
  kNoLane = 12,
  kParamError = 13,
  kInvalidArgument = 14,
  kIoError = 15,
  kConfigError = 16,
  kInternal = 17,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & message)
  : std::runtime_error(message), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string & message);

}  // namespace drivelab
