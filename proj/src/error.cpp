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
#include "garmentseg/error.hpp"

namespace garmentseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kDegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::kDuplicateClass: return "DuplicateClass";
    case ErrorCode::kBadFractions: return "BadFractions";
    case ErrorCode::kDuplicateIds: return "DuplicateIds";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kDecodeFailure: return "DecodeFailure";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMixedModes: return "MixedModes";
    case ErrorCode::kBadThreshold: return "BadThreshold";
    case ErrorCode::kManifestError: return "ManifestError";
  }
  return "Unknown";
}

bool is_environment_error(ErrorCode code) {
  return code == ErrorCode::kBackendFailure ||
         code == ErrorCode::kBackendUnavailable ||
         code == ErrorCode::kIoFailure;
}

}  // namespace garmentseg
