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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "garmentseg/annotations.hpp"
#include "garmentseg/geometry.hpp"
#include "garmentseg/models.hpp"

namespace garmentseg {

// ---------------------------------------------------------------------------
// Classification reports

struct ClassReportRow {
  ImageClassLabel label = ImageClassLabel::Top;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t predicted = 0;
  // A zero denominator forced precision or recall to 0.
  bool ill_defined = false;
};

struct ClassificationReport {
  ClassifierMode mode = ClassifierMode::FiveClass;
  std::vector<ClassReportRow> rows;  // in labels_for(mode) order
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total_support = 0;
};

struct LabelPair {
  ImageClassLabel truth;
  ImageClassLabel predicted;
};

// Throws kEmptyInput, kMixedModes (a label outside `mode`).
ClassificationReport classification_report(std::span<const LabelPair> pairs,
                                           ClassifierMode mode = ClassifierMode::FiveClass);

// Title defaults to "Image classifier [N classes]".
std::string render_classification_report(const ClassificationReport& report,
                                         std::string_view title = {});
std::string to_json(const ClassificationReport& report);

// ---------------------------------------------------------------------------
// Average precision

enum class IouKind { Mask, Box };

std::string_view to_string(IouKind kind);
std::optional<IouKind> parse_iou_kind(std::string_view text);

struct GroundTruth {
  std::string image_id;
  GarmentClass cls = GarmentClass::Top;
  std::optional<BinaryMask> mask;
  BBox box;

  static GroundTruth from_mask(std::string image_id, GarmentClass cls, BinaryMask mask);
  static GroundTruth from_box(std::string image_id, GarmentClass cls, BBox box);
};

struct ScoredDetection {
  std::string image_id;
  Detection detection;
};

// Mask IoU falls back to the filled ground-truth box when the ground truth
// carries no mask.
double region_iou(const GroundTruth& gt, const Detection& det, IouKind kind);

// Greedy score-ordered matching against each image's unmatched ground
// truths, then the area under the monotone precision envelope. Returns
// nullopt when the class has neither ground truths nor detections. Throws
// kBadThreshold unless 0 < threshold < 1.
std::optional<double> average_precision(std::span<const GroundTruth> gts,
                                        std::span<const ScoredDetection> dets,
                                        GarmentClass cls, double threshold,
                                        IouKind kind = IouKind::Mask);

struct APResult {
  IouKind iou_kind = IouKind::Mask;
  std::vector<double> thresholds;
  // mean over classes with a defined AP; nullopt when none is defined.
  std::vector<std::optional<double>> map;
  // per_class_ap[t][static_cast<int>(cls)]
  std::vector<std::array<std::optional<double>, 2>> per_class_ap;

  std::optional<double> ap(std::size_t threshold_index, GarmentClass cls) const {
    return per_class_ap[threshold_index][static_cast<std::size_t>(cls)];
  }
};

inline const std::vector<double> kDefaultIouThresholds = {0.5, 0.6, 0.7, 0.8, 0.9};

// Throws kBadThreshold unless thresholds are ascending and inside (0, 1).
APResult map_over_thresholds(std::span<const GroundTruth> gts,
                             std::span<const ScoredDetection> dets,
                             std::span<const double> thresholds,
                             IouKind kind = IouKind::Mask);

struct MapTableRow {
  std::string name;
  std::vector<std::optional<double>> values;
};

// Column heads mAP50..mAP90 from the thresholds; values printed to at most
// three decimals.
std::string render_map_table(std::span<const double> thresholds,
                             std::span<const MapTableRow> rows,
                             std::string_view title = "mAP comparison");
std::string to_json(const APResult& result);

// "0.975", "0.438", "0.5", "0.0"
std::string format_map_value(double v);

}  // namespace garmentseg
