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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "garmentseg/annotations.hpp"
#include "garmentseg/error.hpp"
#include "garmentseg/image.hpp"
#include "garmentseg/models.hpp"
#include "garmentseg/preprocessing.hpp"

namespace garmentseg {

enum class RouteAction { Segment, Passthrough, Skip };

// FullBody/HalfBody -> Segment, Top/Bottom -> Passthrough,
// Accessories -> Skip.
RouteAction route_action(ImageClassLabel label);

struct PipelineConfig {
  PreprocessOptions preprocess;
  // Segmenter detections below this score are dropped.
  double score_floor = 0.5;
  // Classify the background-removed image rather than the raw input.
  bool classify_on_cleaned = true;
  int workers = 1;
};

struct Backends {
  std::shared_ptr<const ClassifierBackend> classifier;
  std::shared_ptr<const SegmenterBackend> segmenter;
  std::shared_ptr<const ForegroundBackend> foreground;
};

struct PipelineOutput {
  std::string image_id;
  std::optional<ImageClassLabel> route;  // unset for destroyed images
  double route_score = 0.0;
  std::vector<double> route_scores;
  std::vector<Detection> garments;  // at most one per GarmentClass
  bool skipped = false;
  bool destroyed = false;
  double foreground_fraction = 0.0;
};

// Preprocess, classify, then segment / pass through / skip according to
// the route. Backend exceptions surface as kBackendFailure naming the
// stage.
PipelineOutput run_pipeline(const Image& img, const std::string& image_id,
                            const Backends& backends, const PipelineConfig& cfg);

// mask_paths, when given, must hold one path per garment.
std::string to_json(const PipelineOutput& out,
                    const std::vector<std::string>& mask_paths = {});

struct BatchFailure {
  std::string image_id;
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

struct BatchSummary {
  std::size_t images = 0;
  std::size_t processed = 0;
  std::map<std::string, std::size_t> route_counts;  // every ImageClassLabel
  std::size_t skipped = 0;
  std::size_t destroyed = 0;
  std::vector<BatchFailure> failures;
};

std::string to_json(const BatchSummary& summary);

struct OverlayOptions;

// Runs every manifest image. Per-image failures are recorded in the summary
// and never stop the batch. Writes <id>.json and mask PNGs per image (plus
// <id>_overlay.png when `overlay` is set), detections.json (evaluation
// interchange) and summary.json. Backends that are not concurrent-safe are
// called under a lock.
BatchSummary run_batch(const Manifest& manifest, const std::filesystem::path& manifest_dir,
                       const Backends& backends, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir,
                       const OverlayOptions* overlay = nullptr);

// File-name-safe form of an image id.
std::string safe_file_stem(const std::string& image_id);

struct OverlayOptions {
  double alpha = 0.4;
  bool draw_boxes = true;
  bool draw_captions = true;
  bool watermark = true;
};

inline constexpr Rgb kTopColor{0, 255, 0};
inline constexpr Rgb kBottomColor{255, 0, 0};

// Tints each garment's mask pixels (tops green, bottoms red), outlines its
// box and captions it "top 0.95"; stamps the route in the top-left corner.
Image render_overlay(const Image& img, const PipelineOutput& out,
                     const OverlayOptions& options = {});

// 3x5 bitmap text scaled by `scale`; unknown characters render blank.
void draw_text(Image& img, int x, int y, const std::string& text, Rgb color, int scale = 2);

}  // namespace garmentseg
