// Copyright 2026 The garmentseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
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

namespace garmentseg {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedDocument,
  kUnknownLabel,
  kDegeneratePolygon,
  kDuplicateClass,
  kBadFractions,
  kDuplicateIds,
  kUnknownId,
  kIoFailure,
  kDimensionMismatch,
  kEmptyMask,
  kBackendFailure,
  kBackendUnavailable,
  kEmptyClass,
  kEmptyDataset,
  kDecodeFailure,
  kEmptyInput,
  kMixedModes,
  kBadThreshold,
  kManifestError,
};

std::string_view to_string(ErrorCode code);

// True for failures caused by the runtime environment or a model backend
// rather than by the input data.
bool is_environment_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace garmentseg
