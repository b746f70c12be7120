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

#include <span>
#include <string>
#include <string_view>

namespace garmentseg {

// Task names accepted by run_command, in CLI order.
std::span<const std::string_view> command_names();

// Runs one dataset/training/evaluation task. `options_json` is a JSON
// object; an optional "config" key names a JSON file whose keys act as
// defaults (a section named after the task overrides the top level, and
// explicit options override both). Returns a JSON result document.
// Throws Error; kInvalidArgument for unknown tasks or bad options.
std::string run_command(std::string_view name, std::string_view options_json);

}  // namespace garmentseg
