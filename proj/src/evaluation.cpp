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
#include "garmentseg/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "garmentseg/error.hpp"

namespace garmentseg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) {
    fail(ErrorCode::kBadThreshold, "IoU threshold must lie in (0, 1)");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ClassificationReport classification_report(std::span<const LabelPair> pairs,
                                           ClassifierMode mode) {
  if (pairs.empty()) fail(ErrorCode::kEmptyInput, "no (true, predicted) pairs");
  const auto labels = labels_for(mode);
  std::vector<std::size_t> tp(labels.size(), 0);
  std::vector<std::size_t> support(labels.size(), 0);
  std::vector<std::size_t> predicted(labels.size(), 0);
  ClassificationReport report;
  report.mode = mode;
  for (const LabelPair& p : pairs) {
    const std::size_t t = label_index(p.truth, mode);
    const std::size_t q = label_index(p.predicted, mode);
    ++support[t];
    ++predicted[q];
    if (t == q) {
      ++tp[t];
      ++report.correct;
    }
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    ClassReportRow row;
    row.label = labels[k];
    row.support = support[k];
    row.predicted = predicted[k];
    row.ill_defined = predicted[k] == 0 || support[k] == 0;
    row.precision = predicted[k] ? static_cast<double>(tp[k]) / static_cast<double>(predicted[k]) : 0.0;
    row.recall = support[k] ? static_cast<double>(tp[k]) / static_cast<double>(support[k]) : 0.0;
    row.f1 = row.precision + row.recall > 0.0
                 ? 2.0 * row.precision * row.recall / (row.precision + row.recall)
                 : 0.0;
    report.rows.push_back(row);
  }
  report.total_support = pairs.size();
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(pairs.size());
  return report;
}

std::string render_classification_report(const ClassificationReport& report,
                                         std::string_view title) {
  std::ostringstream os;
  if (title.empty()) {
    os << "Image classifier [" << labels_for(report.mode).size() << " classes]\n";
  } else {
    os << title << '\n';
  }
  constexpr std::size_t kName = 13;
  os << pad_right("", kName) << pad_left("Precision", 10) << pad_left("Recall", 8)
     << pad_left("F1-Score", 10) << pad_left("Support", 9) << '\n';
  bool any_ill = false;
  for (const ClassReportRow& row : report.rows) {
    std::string name(display_name(row.label));
    if (row.ill_defined) {
      name += '*';
      any_ill = true;
    }
    os << pad_right(name, kName) << pad_left(fixed2(row.precision), 10)
       << pad_left(fixed2(row.recall), 8) << pad_left(fixed2(row.f1), 10)
       << pad_left(std::to_string(row.support), 9) << '\n';
  }
  os << pad_right("Accuracy", kName) << pad_left("", 10) << pad_left("", 8)
     << pad_left(fixed2(report.accuracy), 10) << pad_left(std::to_string(report.total_support), 9)
     << '\n';
  if (any_ill) os << "* zero denominator: metric set to 0\n";
  return os.str();
}

std::string to_json(const ClassificationReport& report) {
  ordered_json j;
  j["mode"] = static_cast<int>(report.mode);
  ordered_json rows = ordered_json::array();
  for (const ClassReportRow& r : report.rows) {
    rows.push_back({{"label", to_string(r.label)},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1},
                    {"support", r.support},
                    {"predicted", r.predicted},
                    {"ill_defined", r.ill_defined}});
  }
  j["per_class"] = std::move(rows);
  j["accuracy"] = report.accuracy;
  j["correct"] = report.correct;
  j["total_support"] = report.total_support;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::string_view to_string(IouKind kind) { return kind == IouKind::Mask ? "mask" : "box"; }

std::optional<IouKind> parse_iou_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "mask") return IouKind::Mask;
  if (s == "box" || s == "bbox") return IouKind::Box;
  return std::nullopt;
}

GroundTruth GroundTruth::from_mask(std::string image_id, GarmentClass cls, BinaryMask mask) {
  GroundTruth gt;
  gt.image_id = std::move(image_id);
  gt.cls = cls;
  gt.box = mask_to_bbox(mask);
  gt.mask = std::move(mask);
  return gt;
}

GroundTruth GroundTruth::from_box(std::string image_id, GarmentClass cls, BBox box) {
  GroundTruth gt;
  gt.image_id = std::move(image_id);
  gt.cls = cls;
  gt.box = box;
  return gt;
}

double region_iou(const GroundTruth& gt, const Detection& det, IouKind kind) {
  if (kind == IouKind::Box) return box_iou(gt.box, det.box);
  if (gt.mask) return mask_iou(*gt.mask, det.mask);
  return mask_iou(filled_box(gt.box, det.mask.width(), det.mask.height()), det.mask);
}

std::optional<double> average_precision(std::span<const GroundTruth> gts,
                                        std::span<const ScoredDetection> dets,
                                        GarmentClass cls, double threshold, IouKind kind) {
  check_threshold(threshold);

  std::map<std::string, std::vector<std::size_t>> pools;
  std::size_t n_gt = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].cls != cls) continue;
    pools[gts[i].image_id].push_back(i);
    ++n_gt;
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].detection.cls == cls) order.push_back(i);
  }
  if (n_gt == 0) {
    if (order.empty()) return std::nullopt;
    return 0.0;
  }
  std::stable_sort(order.begin(), order.end(), [&dets](std::size_t a, std::size_t b) {
    return dets[a].detection.score > dets[b].detection.score;
  });

  std::vector<bool> matched(gts.size(), false);
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const ScoredDetection& d = dets[order[k]];
    double best = -1.0;
    std::size_t best_gt = 0;
    if (const auto it = pools.find(d.image_id); it != pools.end()) {
      for (std::size_t g : it->second) {
        if (matched[g]) continue;
        const double iou = region_iou(gts[g], d.detection, kind);
        if (iou > best) {
          best = iou;
          best_gt = g;
        }
      }
    }
    if (best >= threshold) {
      matched[best_gt] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
  }

  for (std::size_t k = precision.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    if (recall[k] > prev_recall) {
      ap += (recall[k] - prev_recall) * precision[k];
      prev_recall = recall[k];
    }
  }
  return ap;
}

APResult map_over_thresholds(std::span<const GroundTruth> gts,
                             std::span<const ScoredDetection> dets,
                             std::span<const double> thresholds, IouKind kind) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    check_threshold(thresholds[i]);
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      fail(ErrorCode::kBadThreshold, "IoU thresholds must be strictly ascending");
    }
  }
  APResult result;
  result.iou_kind = kind;
  result.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double t : thresholds) {
    std::array<std::optional<double>, 2> per_class;
    double sum = 0.0;
    int defined = 0;
    for (GarmentClass cls : kGarmentClasses) {
      const auto ap = average_precision(gts, dets, cls, t, kind);
      per_class[static_cast<std::size_t>(cls)] = ap;
      if (ap) {
        sum += *ap;
        ++defined;
      }
    }
    result.per_class_ap.push_back(per_class);
    result.map.push_back(defined ? std::optional<double>(sum / defined) : std::nullopt);
  }
  return result;
}

std::string format_map_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string render_map_table(std::span<const double> thresholds,
                             std::span<const MapTableRow> rows, std::string_view title) {
  std::size_t name_width = 12;
  for (const MapTableRow& r : rows) name_width = std::max(name_width, r.name.size() + 2);
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  os << pad_right("", name_width);
  for (double t : thresholds) {
    os << pad_left("mAP" + std::to_string(static_cast<int>(std::lround(t * 100))), 7);
  }
  os << '\n';
  for (const MapTableRow& r : rows) {
    os << pad_right(r.name, name_width);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      const bool has = i < r.values.size() && r.values[i].has_value();
      os << pad_left(has ? format_map_value(*r.values[i]) : "n/a", 7);
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const APResult& result) {
  ordered_json j;
  j["iou_kind"] = to_string(result.iou_kind);
  j["thresholds"] = result.thresholds;
  ordered_json table = ordered_json::array();
  for (std::size_t i = 0; i < result.thresholds.size(); ++i) {
    ordered_json row;
    row["threshold"] = result.thresholds[i];
    row["mAP"] = result.map[i] ? ordered_json(*result.map[i]) : ordered_json(nullptr);
    for (GarmentClass cls : kGarmentClasses) {
      const auto ap = result.ap(i, cls);
      row["AP_" + std::string(to_string(cls))] = ap ? ordered_json(*ap) : ordered_json(nullptr);
    }
    table.push_back(std::move(row));
  }
  j["per_threshold"] = std::move(table);
  return j.dump(2) + "\n";
}

}  // namespace garmentseg
