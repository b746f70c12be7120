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
#include "garmentseg/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "garmentseg/error.hpp"
#include "model_io.hpp"

namespace garmentseg {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<ImageClassLabel, 4> kFourClass = {
    ImageClassLabel::Top, ImageClassLabel::Bottom, ImageClassLabel::FullBody,
    ImageClassLabel::HalfBody};

std::string normalise_token(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json& v, const std::array<Enum, N>& values, std::string_view key) {
  if (!v.is_string()) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" must be a string");
  }
  const std::string want = normalise_token(v.get<std::string>());
  for (Enum e : values) {
    if (normalise_token(to_string(e)) == want) return e;
  }
  fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" has unknown value \"" +
                                        v.get<std::string>() + "\"");
}

double positive_number(const json& v, std::string_view key, bool allow_zero = false) {
  if (!v.is_number()) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d) || d < 0.0 || (!allow_zero && d == 0.0)) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" out of range");
  }
  return d;
}

int count_value(const json& v, std::string_view key, bool allow_zero = false) {
  if (!v.is_number_integer()) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" must be an integer");
  }
  const long long n = v.get<long long>();
  if (n < (allow_zero ? 0 : 1) || n > 1'000'000'000) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + std::string(key) + "\" out of range");
  }
  return static_cast<int>(n);
}

json parse_object(std::string_view text, std::string_view what) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kInvalidArgument, std::string(what) + " must be an object");
  return doc;
}

double parse_double(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kBackendUnavailable, "bad number \"" + text + "\" in backend spec \"" + spec + "\"");
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ImageClassLabel label) {
  switch (label) {
    case ImageClassLabel::Top: return "Top";
    case ImageClassLabel::Bottom: return "Bottom";
    case ImageClassLabel::FullBody: return "FullBody";
    case ImageClassLabel::HalfBody: return "HalfBody";
    case ImageClassLabel::Accessories: return "Accessories";
  }
  return "?";
}

std::string_view display_name(ImageClassLabel label) {
  switch (label) {
    case ImageClassLabel::Top: return "Tops";
    case ImageClassLabel::Bottom: return "Bottoms";
    case ImageClassLabel::FullBody: return "Full Bodies";
    case ImageClassLabel::HalfBody: return "Half Bodies";
    case ImageClassLabel::Accessories: return "Accessories";
  }
  return "?";
}

std::optional<ImageClassLabel> parse_image_class_label(std::string_view text) {
  const std::string key = normalise_token(text);
  for (ImageClassLabel l : kAllImageClassLabels) {
    if (normalise_token(to_string(l)) == key || normalise_token(display_name(l)) == key) return l;
  }
  if (key == "accessory" || key == "noise") return ImageClassLabel::Accessories;
  return std::nullopt;
}

std::span<const ImageClassLabel> labels_for(ClassifierMode mode) {
  if (mode == ClassifierMode::FourClass) return kFourClass;
  return kAllImageClassLabels;
}

bool in_mode(ImageClassLabel label, ClassifierMode mode) {
  return mode == ClassifierMode::FiveClass || label != ImageClassLabel::Accessories;
}

std::size_t label_index(ImageClassLabel label, ClassifierMode mode) {
  if (!in_mode(label, mode)) {
    fail(ErrorCode::kMixedModes, "label " + std::string(to_string(label)) +
                                     " is not part of the four-class mode");
  }
  return static_cast<std::size_t>(label);
}

ClassifierMode mode_from_class_count(int n) {
  if (n == 4) return ClassifierMode::FourClass;
  if (n == 5) return ClassifierMode::FiveClass;
  fail(ErrorCode::kInvalidArgument, "num_classes must be 4 or 5");
}

std::string_view to_string(ClassifierBackbone b) {
  switch (b) {
    case ClassifierBackbone::ResNet50: return "ResNet50";
    case ClassifierBackbone::VGG16: return "VGG16";
    case ClassifierBackbone::InceptionV3: return "InceptionV3";
  }
  return "?";
}
std::string_view to_string(Optimizer) { return "Adam"; }
std::string_view to_string(Loss) { return "CategoricalCrossEntropy"; }
std::string_view to_string(SegmenterBackbone) { return "ResNet101"; }
std::string_view to_string(InitWeights w) {
  switch (w) {
    case InitWeights::ImageNet: return "ImageNet";
    case InitWeights::COCO: return "COCO";
    case InitWeights::ModaNet: return "ModaNet";
  }
  return "?";
}

InputConvention input_convention(ClassifierBackbone b) {
  if (b == ClassifierBackbone::InceptionV3) return {299, "tf"};
  return {224, "caffe"};
}

std::string to_json(const ClassifierConfig& cfg) {
  ordered_json j;
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["loss"] = to_string(cfg.loss);
  j["optimizer"] = to_string(cfg.optimizer);
  j["epochs"] = cfg.epochs;
  j["backbone"] = to_string(cfg.backbone);
  j["num_classes"] = cfg.num_classes;
  j["seed"] = cfg.seed;
  return j.dump();
}

std::string to_json(const SegmenterConfig& cfg) {
  ordered_json j;
  j["lr_heads"] = cfg.lr_heads;
  j["lr_all"] = cfg.lr_all;
  j["epochs_heads"] = cfg.epochs_heads;
  j["epochs_all"] = cfg.epochs_all;
  j["momentum"] = cfg.momentum;
  j["weight_decay"] = cfg.weight_decay;
  j["backbone"] = to_string(cfg.backbone);
  j["init_weights"] = to_string(cfg.init_weights);
  j["init_weights_path"] = cfg.init_weights_path;
  j["seed"] = cfg.seed;
  j["pixels_per_image"] = cfg.pixels_per_image;
  j["pixel_batch"] = cfg.pixel_batch;
  j["min_component_fraction"] = cfg.min_component_fraction;
  return j.dump();
}

ClassifierConfig parse_classifier_config(std::string_view json_text, ClassifierConfig cfg) {
  const json doc = parse_object(json_text, "classifier config");
  for (const auto& [key, v] : doc.items()) {
    if (key == "learning_rate") {
      cfg.learning_rate = positive_number(v, key);
    } else if (key == "batch_size") {
      cfg.batch_size = count_value(v, key);
    } else if (key == "loss") {
      cfg.loss = parse_enum(v, std::array{Loss::CategoricalCrossEntropy}, key);
    } else if (key == "optimizer") {
      cfg.optimizer = parse_enum(v, std::array{Optimizer::Adam}, key);
    } else if (key == "epochs") {
      cfg.epochs = count_value(v, key);
    } else if (key == "backbone") {
      cfg.backbone = parse_enum(v,
                                std::array{ClassifierBackbone::ResNet50, ClassifierBackbone::VGG16,
                                           ClassifierBackbone::InceptionV3},
                                key);
    } else if (key == "num_classes") {
      cfg.num_classes = static_cast<int>(mode_from_class_count(count_value(v, key)));
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        fail(ErrorCode::kInvalidArgument, "config key \"seed\" must be a non-negative integer");
      }
      cfg.seed = v.get<std::uint64_t>();
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown classifier config key \"" + key + "\"");
    }
  }
  return cfg;
}

SegmenterConfig parse_segmenter_config(std::string_view json_text, SegmenterConfig cfg) {
  const json doc = parse_object(json_text, "segmenter config");
  for (const auto& [key, v] : doc.items()) {
    if (key == "lr_heads") {
      cfg.lr_heads = positive_number(v, key);
    } else if (key == "lr_all") {
      cfg.lr_all = positive_number(v, key);
    } else if (key == "epochs_heads") {
      cfg.epochs_heads = count_value(v, key, true);
    } else if (key == "epochs_all") {
      cfg.epochs_all = count_value(v, key, true);
    } else if (key == "momentum") {
      cfg.momentum = positive_number(v, key, true);
      if (cfg.momentum >= 1.0) fail(ErrorCode::kInvalidArgument, "momentum must be < 1");
    } else if (key == "weight_decay") {
      cfg.weight_decay = positive_number(v, key, true);
    } else if (key == "backbone") {
      cfg.backbone = parse_enum(v, std::array{SegmenterBackbone::ResNet101}, key);
    } else if (key == "init_weights") {
      cfg.init_weights = parse_enum(
          v, std::array{InitWeights::ImageNet, InitWeights::COCO, InitWeights::ModaNet}, key);
    } else if (key == "init_weights_path") {
      if (!v.is_string()) fail(ErrorCode::kInvalidArgument, "init_weights_path must be a string");
      cfg.init_weights_path = v.get<std::string>();
    } else if (key == "seed") {
      if (!(v.is_number_integer() && v.get<long long>() >= 0) && !v.is_number_unsigned()) {
        fail(ErrorCode::kInvalidArgument, "config key \"seed\" must be a non-negative integer");
      }
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "pixels_per_image") {
      cfg.pixels_per_image = count_value(v, key);
    } else if (key == "pixel_batch") {
      cfg.pixel_batch = count_value(v, key);
    } else if (key == "min_component_fraction") {
      cfg.min_component_fraction = positive_number(v, key, true);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown segmenter config key \"" + key + "\"");
    }
  }
  if (cfg.epochs_heads + cfg.epochs_all == 0) {
    fail(ErrorCode::kInvalidArgument, "segmenter schedule has no epochs");
  }
  return cfg;
}

// ---------------------------------------------------------------------------

void check_detection(const Detection& d) {
  if (!(d.score >= 0.0 && d.score <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "detection score outside [0, 1]");
  }
  if (d.mask.empty()) fail(ErrorCode::kInvalidArgument, "detection mask is empty");
  if (!(mask_to_bbox(d.mask) == d.box)) {
    fail(ErrorCode::kInvalidArgument, "detection box does not match its mask");
  }
}

Detection make_detection(BinaryMask mask, GarmentClass cls, double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "detection score outside [0, 1]");
  }
  Detection d;
  d.box = mask_to_bbox(mask);
  d.mask = std::move(mask);
  d.cls = cls;
  d.score = score;
  return d;
}

Classification ClassifierBackend::classify(const Image& img) const {
  std::vector<double> scores = score_vector(img);
  const std::size_t want = labels_for(mode()).size();
  if (scores.size() != want) {
    fail(ErrorCode::kBackendFailure, "classifier \"" + name() + "\" returned " +
                                         std::to_string(scores.size()) + " scores, expected " +
                                         std::to_string(want));
  }
  double sum = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorCode::kBackendFailure, "classifier \"" + name() + "\" returned a score outside [0, 1]");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail(ErrorCode::kBackendFailure, "classifier \"" + name() + "\" scores do not sum to 1");
  }
  const auto best = std::max_element(scores.begin(), scores.end());
  Classification out;
  out.label = labels_for(mode())[static_cast<std::size_t>(best - scores.begin())];
  out.score = *best;
  out.scores = std::move(scores);
  return out;
}

std::vector<Detection> SegmenterBackend::detect(const Image& img) const {
  std::vector<Detection> dets = raw_detections(img);
  for (const Detection& d : dets) {
    try {
      check_detection(d);
    } catch (const Error& e) {
      fail(ErrorCode::kBackendFailure, "segmenter \"" + name() + "\": " + e.what());
    }
    if (d.mask.width() != img.width() || d.mask.height() != img.height()) {
      fail(ErrorCode::kBackendFailure, "segmenter \"" + name() + "\" returned a mis-sized mask");
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return dets;
}

// ---------------------------------------------------------------------------

FixedClassifier::FixedClassifier(ImageClassLabel label, double score, ClassifierMode mode)
    : mode_(mode) {
  if (!(score >= 0.0 && score <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "mock classifier score outside [0, 1]");
  }
  const std::size_t n = labels_for(mode).size();
  const std::size_t idx = label_index(label, mode);
  scores_.assign(n, (1.0 - score) / static_cast<double>(n - 1));
  scores_[idx] = score;
}

FixedClassifier::FixedClassifier(std::vector<double> scores, ClassifierMode mode)
    : scores_(std::move(scores)), mode_(mode) {}

std::string FixedClassifier::name() const {
  const auto best = std::max_element(scores_.begin(), scores_.end());
  std::ostringstream os;
  os << "mock:fixed:";
  if (best != scores_.end()) {
    os << to_string(labels_for(mode_)[static_cast<std::size_t>(best - scores_.begin())]) << "@"
       << *best;
  }
  if (mode_ == ClassifierMode::FourClass) os << ":4";
  return os.str();
}

BBox to_pixel_box(const RelativeBox& box, int width, int height) {
  auto lo = [](double f, int n) { return std::clamp(static_cast<int>(std::floor(f * n)), 0, n - 1); };
  auto hi = [](double f, int n) {
    return std::clamp(static_cast<int>(std::ceil(f * n)) - 1, 0, n - 1);
  };
  BBox b{lo(box.x0, width), lo(box.y0, height), hi(box.x1, width), hi(box.y1, height)};
  b.x_max = std::max(b.x_max, b.x_min);
  b.y_max = std::max(b.y_max, b.y_min);
  return b;
}

FixedSegmenter::FixedSegmenter(std::vector<MockDetection> detections, std::string name)
    : detections_(std::move(detections)), name_(std::move(name)) {
  for (const MockDetection& d : detections_) {
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "mock detection score outside [0, 1]");
    }
  }
}

std::vector<Detection> FixedSegmenter::raw_detections(const Image& img) const {
  std::vector<Detection> out;
  if (img.empty()) return out;
  for (const MockDetection& d : detections_) {
    out.push_back(make_detection(
        filled_box(to_pixel_box(d.box, img.width(), img.height()), img.width(), img.height()),
        d.cls, d.score));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_jsonl(std::span<const EpochRecord> log) {
  std::string out;
  for (const EpochRecord& r : log) {
    ordered_json j;
    j["epoch"] = r.epoch;
    j["phase"] = r.phase;
    j["phase_start"] = r.phase_start;
    j["lr"] = r.lr;
    j["loss"] = r.loss;
    j["metric"] = r.metric;
    j["optimizer"] = r.optimizer;
    j["batch_size"] = r.batch_size;
    j["trainable"] = r.trainable;
    j["backbone_delta"] = r.backbone_delta;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::shared_ptr<const ClassifierBackend> make_classifier(const std::string& spec) {
  const std::string fixed = "mock:fixed:";
  if (spec.starts_with(fixed)) {
    std::string rest = spec.substr(fixed.size());
    ClassifierMode mode = ClassifierMode::FiveClass;
    if (rest.ends_with(":4")) {
      mode = ClassifierMode::FourClass;
      rest.resize(rest.size() - 2);
    } else if (rest.ends_with(":5")) {
      rest.resize(rest.size() - 2);
    }
    const auto at = rest.find('@');
    if (at == std::string::npos) {
      fail(ErrorCode::kBackendUnavailable, "mock classifier spec needs <Label>@<score>: \"" + spec + "\"");
    }
    const auto label = parse_image_class_label(rest.substr(0, at));
    if (!label) fail(ErrorCode::kBackendUnavailable, "unknown label in \"" + spec + "\"");
    const double score = parse_double(rest.substr(at + 1), spec);
    try {
      return std::make_shared<FixedClassifier>(*label, score, mode);
    } catch (const Error& e) {
      fail(ErrorCode::kBackendUnavailable, "backend \"" + spec + "\": " + e.what());
    }
  }
  if (spec.starts_with("mock:")) {
    fail(ErrorCode::kBackendUnavailable, "unknown mock classifier \"" + spec + "\"");
  }
  const std::string kind = detail::model_kind(spec);
  if (kind != "native-classifier") {
    fail(ErrorCode::kBackendUnavailable, "\"" + spec + "\" is not a classifier model");
  }
  return NativeClassifier::load(spec);
}

std::shared_ptr<const SegmenterBackend> make_segmenter(const std::string& spec) {
  if (spec == "mock:none") return std::make_shared<FixedSegmenter>(std::vector<MockDetection>{}, spec);
  if (spec == "mock:halves") {
    return std::make_shared<FixedSegmenter>(
        std::vector<MockDetection>{{GarmentClass::Top, 0.95, {0.25, 0.1, 0.75, 0.5}},
                                   {GarmentClass::Bottom, 0.90, {0.25, 0.5, 0.75, 0.9}}},
        spec);
  }
  const std::string fixed = "mock:fixed:";
  if (spec.starts_with(fixed)) {
    std::vector<MockDetection> dets;
    for (const std::string& entry : split_on(spec.substr(fixed.size()), ';')) {
      const auto parts = split_on(entry, '@');
      if (parts.size() != 3) {
        fail(ErrorCode::kBackendUnavailable, "mock detection must be <class>@<score>@<box>: \"" + entry + "\"");
      }
      const auto cls = parse_garment_class(parts[0]);
      if (!cls) fail(ErrorCode::kBackendUnavailable, "unknown class in \"" + entry + "\"");
      const auto coords = split_on(parts[2], ',');
      if (coords.size() != 4) {
        fail(ErrorCode::kBackendUnavailable, "mock box needs 4 fractions: \"" + entry + "\"");
      }
      dets.push_back({*cls, parse_double(parts[1], spec),
                      {parse_double(coords[0], spec), parse_double(coords[1], spec),
                       parse_double(coords[2], spec), parse_double(coords[3], spec)}});
    }
    try {
      return std::make_shared<FixedSegmenter>(std::move(dets), spec);
    } catch (const Error& e) {
      fail(ErrorCode::kBackendUnavailable, "backend \"" + spec + "\": " + e.what());
    }
  }
  if (spec.starts_with("mock:")) {
    fail(ErrorCode::kBackendUnavailable, "unknown mock segmenter \"" + spec + "\"");
  }
  const std::string kind = detail::model_kind(spec);
  if (kind != "native-segmenter") {
    fail(ErrorCode::kBackendUnavailable, "\"" + spec + "\" is not a segmenter model");
  }
  return NativeSegmenter::load(spec);
}

}  // namespace garmentseg
