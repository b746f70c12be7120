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
#include "garmentseg/garmentseg.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "garmentseg/commands.hpp"
#include "garmentseg/error.hpp"
#include "garmentseg/geometry.hpp"
#include "garmentseg/pipeline.hpp"
#include "model_io.hpp"

struct gs_mask {
  garmentseg::BinaryMask mask;
};

struct gs_pipeline {
  garmentseg::Backends backends;
  garmentseg::PipelineConfig cfg;
};

namespace {

using garmentseg::Error;
using garmentseg::ErrorCode;

thread_local std::string last_error;

gs_status to_status(ErrorCode code) {
  return static_cast<gs_status>(static_cast<int>(code) + 1);
}

gs_status set_error(gs_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
gs_status guarded(F&& f) {
  try {
    f();
    return GS_OK;
  } catch (const Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(GS_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(GS_INTERNAL_ERROR, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

extern "C" {

const char* gs_status_name(gs_status status) {
  if (status == GS_OK) return "OK";
  if (status == GS_INTERNAL_ERROR) return "InternalError";
  if (status < GS_OK || status > GS_INTERNAL_ERROR) return "Unknown";
  static thread_local std::string name;
  name = std::string(garmentseg::to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1)));
  return name.c_str();
}

int gs_status_exit_code(gs_status status) {
  if (status == GS_OK) return 0;
  if (status == GS_INTERNAL_ERROR) return 2;
  if (status < GS_OK || status > GS_INTERNAL_ERROR) return 2;
  return garmentseg::is_environment_error(static_cast<ErrorCode>(static_cast<int>(status) - 1)) ? 2 : 1;
}

const char* gs_last_error(void) { return last_error.c_str(); }

const char* gs_version(void) { return "1.0.0"; }

void gs_string_free(char* s) { std::free(s); }

size_t gs_task_count(void) { return garmentseg::command_names().size(); }

const char* gs_task_name(size_t index) {
  const auto names = garmentseg::command_names();
  // Names are string literals, so data() is NUL-terminated.
  return index < names.size() ? names[index].data() : nullptr;
}

gs_status gs_run_task(const char* task, const char* options_json, char** result_json) {
  return guarded([&] {
    require(task != nullptr && result_json != nullptr, "task and result_json are required");
    *result_json = nullptr;
    const std::string result = garmentseg::run_command(task, options_json ? options_json : "");
    *result_json = copy_string(result);
  });
}

gs_status gs_mask_create(int32_t width, int32_t height, gs_mask** out) {
  return guarded([&] {
    require(out != nullptr, "out is required");
    require(width >= 0 && height >= 0, "mask dimensions must be non-negative");
    *out = new gs_mask{garmentseg::BinaryMask(width, height)};
  });
}

gs_status gs_mask_rasterize(const double* xy, size_t vertex_count, int32_t width,
                            int32_t height, gs_mask** out) {
  return guarded([&] {
    require(out != nullptr, "out is required");
    require(xy != nullptr || vertex_count == 0, "vertices are required");
    require(width >= 0 && height >= 0, "mask dimensions must be non-negative");
    std::vector<garmentseg::Point> pts;
    for (size_t i = 0; i < vertex_count; ++i) pts.push_back({xy[2 * i], xy[2 * i + 1]});
    *out = new gs_mask{garmentseg::rasterize(pts, width, height)};
  });
}

gs_status gs_mask_load_png(const char* path, gs_mask** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out are required");
    *out = new gs_mask{garmentseg::load_mask_png(path)};
  });
}

gs_status gs_mask_save_png(const gs_mask* mask, const char* path) {
  return guarded([&] {
    require(mask != nullptr && path != nullptr, "mask and path are required");
    garmentseg::save_mask_png(path, mask->mask);
  });
}

void gs_mask_free(gs_mask* mask) { delete mask; }

int32_t gs_mask_width(const gs_mask* mask) { return mask ? mask->mask.width() : 0; }

int32_t gs_mask_height(const gs_mask* mask) { return mask ? mask->mask.height() : 0; }

int gs_mask_get(const gs_mask* mask, int32_t x, int32_t y) {
  if (mask == nullptr || x < 0 || y < 0 || x >= mask->mask.width() || y >= mask->mask.height()) {
    return 0;
  }
  return mask->mask.get(x, y) ? 1 : 0;
}

gs_status gs_mask_set(gs_mask* mask, int32_t x, int32_t y, int value) {
  return guarded([&] {
    require(mask != nullptr, "mask is required");
    require(x >= 0 && y >= 0 && x < mask->mask.width() && y < mask->mask.height(),
            "pixel outside the mask");
    mask->mask.set(x, y, value != 0);
  });
}

size_t gs_mask_count(const gs_mask* mask) { return mask ? mask->mask.count() : 0; }

gs_status gs_mask_iou(const gs_mask* a, const gs_mask* b, double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "masks and out are required");
    *out = garmentseg::mask_iou(a->mask, b->mask);
  });
}

gs_status gs_mask_bbox(const gs_mask* mask, gs_bbox* out) {
  return guarded([&] {
    require(mask != nullptr && out != nullptr, "mask and out are required");
    const garmentseg::BBox b = garmentseg::mask_to_bbox(mask->mask);
    *out = gs_bbox{b.x_min, b.y_min, b.x_max, b.y_max};
  });
}

gs_status gs_mask_largest_component(const gs_mask* mask, gs_mask** out) {
  return guarded([&] {
    require(mask != nullptr && out != nullptr, "mask and out are required");
    *out = new gs_mask{garmentseg::largest_component(mask->mask)};
  });
}

gs_status gs_box_iou(const gs_bbox* a, const gs_bbox* b, double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "boxes and out are required");
    *out = garmentseg::box_iou({a->x_min, a->y_min, a->x_max, a->y_max},
                               {b->x_min, b->y_min, b->x_max, b->y_max});
  });
}

gs_status gs_pipeline_create(const char* options_json, gs_pipeline** out) {
  return guarded([&] {
    require(options_json != nullptr && out != nullptr, "options_json and out are required");
    *out = nullptr;
    nlohmann::json o;
    try {
      o = nlohmann::json::parse(options_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("options are not valid JSON: ") + e.what());
    }
    auto p = std::make_unique<gs_pipeline>();
    try {
      p->backends.classifier = garmentseg::make_classifier(o.at("classifier").get<std::string>());
      p->backends.segmenter = garmentseg::make_segmenter(o.at("segmenter").get<std::string>());
      p->backends.foreground = garmentseg::make_foreground_backend(
          o.value("foreground", std::string("color-threshold")));
      p->cfg.preprocess.tau = o.value("tau", p->cfg.preprocess.tau);
      p->cfg.score_floor = o.value("score_floor", p->cfg.score_floor);
      p->cfg.classify_on_cleaned = !o.value("classify_raw", false);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("pipeline options: ") + e.what());
    }
    *out = p.release();
  });
}

gs_status gs_pipeline_run_file(const gs_pipeline* pipeline, const char* image_path,
                               const char* image_id, const char* mask_dir, char** result_json) {
  return guarded([&] {
    require(pipeline != nullptr && image_path != nullptr && result_json != nullptr,
            "pipeline, image_path and result_json are required");
    *result_json = nullptr;
    const std::filesystem::path path(image_path);
    const std::string id = image_id ? std::string(image_id) : path.stem().string();
    const garmentseg::Image img = garmentseg::load_image(path);
    const garmentseg::PipelineOutput out =
        garmentseg::run_pipeline(img, id, pipeline->backends, pipeline->cfg);
    std::vector<std::string> masks;
    if (mask_dir != nullptr) {
      const std::string stem = garmentseg::safe_file_stem(id);
      for (const garmentseg::Detection& d : out.garments) {
        masks.push_back(stem + "_" + std::string(garmentseg::to_string(d.cls)) + ".png");
        garmentseg::save_mask_png(std::filesystem::path(mask_dir) / masks.back(), d.mask);
      }
    }
    *result_json = copy_string(garmentseg::to_json(out, masks));
  });
}

void gs_pipeline_free(gs_pipeline* pipeline) { delete pipeline; }

}  // extern "C"
