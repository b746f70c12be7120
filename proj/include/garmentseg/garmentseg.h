/* Copyright 2026 The garmentseg Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the garmentseg library.
 *
 * Every fallible call returns a gs_status. On failure a message describing
 * the error is available from gs_last_error() on the calling thread until
 * the next failing call on that thread. Strings returned through char**
 * out-parameters are owned by the caller and released with gs_string_free.
 */
#ifndef GARMENTSEG_GARMENTSEG_H_
#define GARMENTSEG_GARMENTSEG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GS_API __declspec(dllexport)
#else
#define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_INVALID_ARGUMENT,
  GS_MALFORMED_DOCUMENT,
  GS_UNKNOWN_LABEL,
  GS_DEGENERATE_POLYGON,
  GS_DUPLICATE_CLASS,
  GS_BAD_FRACTIONS,
  GS_DUPLICATE_IDS,
  GS_UNKNOWN_ID,
  GS_IO_FAILURE,
  GS_DIMENSION_MISMATCH,
  GS_EMPTY_MASK,
  GS_BACKEND_FAILURE,
  GS_BACKEND_UNAVAILABLE,
  GS_EMPTY_CLASS,
  GS_EMPTY_DATASET,
  GS_DECODE_FAILURE,
  GS_EMPTY_INPUT,
  GS_MIXED_MODES,
  GS_BAD_THRESHOLD,
  GS_MANIFEST_ERROR,
  GS_INTERNAL_ERROR
} gs_status;

/* Stable name such as "InvalidArgument"; "OK" for GS_OK. */
GS_API const char* gs_status_name(gs_status status);
/* Process exit code for a status: 0 success, 1 data error, 2 backend or
 * environment error. */
GS_API int gs_status_exit_code(gs_status status);
GS_API const char* gs_last_error(void);
GS_API const char* gs_version(void);
GS_API void gs_string_free(char* s);

/* Tasks ------------------------------------------------------------------ */

/* Number of task names and the i-th name ("convert", "split", ...). */
GS_API size_t gs_task_count(void);
GS_API const char* gs_task_name(size_t index);

/* Runs a task with a JSON options object. On success *result_json holds a
 * JSON result document. */
GS_API gs_status gs_run_task(const char* task, const char* options_json, char** result_json);

/* Masks ------------------------------------------------------------------ */

typedef struct gs_mask gs_mask;

/* Inclusive pixel bounds. */
typedef struct gs_bbox {
  int32_t x_min;
  int32_t y_min;
  int32_t x_max;
  int32_t y_max;
} gs_bbox;

GS_API gs_status gs_mask_create(int32_t width, int32_t height, gs_mask** out);
/* xy holds vertex_count (x, y) pairs. Pixels whose centre lies inside the
 * polygon (even-odd rule) are set. */
GS_API gs_status gs_mask_rasterize(const double* xy, size_t vertex_count, int32_t width,
                                   int32_t height, gs_mask** out);
GS_API gs_status gs_mask_load_png(const char* path, gs_mask** out);
GS_API gs_status gs_mask_save_png(const gs_mask* mask, const char* path);
GS_API void gs_mask_free(gs_mask* mask);

GS_API int32_t gs_mask_width(const gs_mask* mask);
GS_API int32_t gs_mask_height(const gs_mask* mask);
GS_API int gs_mask_get(const gs_mask* mask, int32_t x, int32_t y);
GS_API gs_status gs_mask_set(gs_mask* mask, int32_t x, int32_t y, int value);
GS_API size_t gs_mask_count(const gs_mask* mask);

GS_API gs_status gs_mask_iou(const gs_mask* a, const gs_mask* b, double* out);
/* GS_EMPTY_MASK for an empty mask. */
GS_API gs_status gs_mask_bbox(const gs_mask* mask, gs_bbox* out);
GS_API gs_status gs_mask_largest_component(const gs_mask* mask, gs_mask** out);
GS_API gs_status gs_box_iou(const gs_bbox* a, const gs_bbox* b, double* out);

/* Pipeline --------------------------------------------------------------- */

typedef struct gs_pipeline gs_pipeline;

/* options_json keys: "classifier", "segmenter", "foreground" (backend
 * specs), "tau", "score_floor", "classify_raw". */
GS_API gs_status gs_pipeline_create(const char* options_json, gs_pipeline** out);
/* Runs one image file; *result_json receives the pipeline output record.
 * When mask_dir is non-NULL each garment mask is written there as
 * <id>_<class>.png. */
GS_API gs_status gs_pipeline_run_file(const gs_pipeline* pipeline, const char* image_path,
                                      const char* image_id, const char* mask_dir,
                                      char** result_json);
GS_API void gs_pipeline_free(gs_pipeline* pipeline);

#ifdef __cplusplus
}
#endif

#endif /* GARMENTSEG_GARMENTSEG_H_ */
