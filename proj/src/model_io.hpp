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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "garmentseg/error.hpp"

namespace garmentseg::detail {

inline std::string read_text(const std::filesystem::path& path,
                             ErrorCode code = ErrorCode::kIoFailure) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(code, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
}

inline nlohmann::json read_json(const std::filesystem::path& path,
                                ErrorCode code = ErrorCode::kIoFailure) {
  const std::string text = read_text(path, code);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(code, path.string() + " is not valid JSON: " + e.what());
  }
}

// "kind" field of <dir>/model.json. Throws kBackendUnavailable.
inline std::string model_kind(const std::filesystem::path& dir) {
  const auto meta = dir / "model.json";
  if (!std::filesystem::is_regular_file(meta)) {
    throw Error(ErrorCode::kBackendUnavailable, "no model artifact at " + dir.string());
  }
  try {
    return read_json(meta, ErrorCode::kBackendUnavailable).at("kind").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, meta.string() + ": " + e.what());
  }
}

}  // namespace garmentseg::detail
