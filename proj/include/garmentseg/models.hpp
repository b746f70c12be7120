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
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "garmentseg/annotations.hpp"
#include "garmentseg/geometry.hpp"
#include "garmentseg/image.hpp"

namespace garmentseg {

// ---------------------------------------------------------------------------
// Routing labels

enum class ImageClassLabel { Top, Bottom, FullBody, HalfBody, Accessories };

inline constexpr std::array<ImageClassLabel, 5> kAllImageClassLabels = {
    ImageClassLabel::Top, ImageClassLabel::Bottom, ImageClassLabel::FullBody,
    ImageClassLabel::HalfBody, ImageClassLabel::Accessories};

// "Top", "Bottom", "FullBody", "HalfBody", "Accessories".
std::string_view to_string(ImageClassLabel label);
// Report row names: "Tops", "Bottoms", "Full Bodies", ...
std::string_view display_name(ImageClassLabel label);
// Case-insensitive; ignores spaces, '_' and '-' ("full body", "half_body").
std::optional<ImageClassLabel> parse_image_class_label(std::string_view text);

// The four-class variant drops Accessories.
enum class ClassifierMode { FourClass = 4, FiveClass = 5 };

std::span<const ImageClassLabel> labels_for(ClassifierMode mode);
bool in_mode(ImageClassLabel label, ClassifierMode mode);
// Index of label within labels_for(mode). Throws kMixedModes.
std::size_t label_index(ImageClassLabel label, ClassifierMode mode);
// Throws kInvalidArgument unless n is 4 or 5.
ClassifierMode mode_from_class_count(int n);

// ---------------------------------------------------------------------------
// Training configuration

enum class ClassifierBackbone { ResNet50, VGG16, InceptionV3 };
enum class Optimizer { Adam };
enum class Loss { CategoricalCrossEntropy };
enum class SegmenterBackbone { ResNet101 };
enum class InitWeights { ImageNet, COCO, ModaNet };

std::string_view to_string(ClassifierBackbone b);
std::string_view to_string(Optimizer o);
std::string_view to_string(Loss l);
std::string_view to_string(SegmenterBackbone b);
std::string_view to_string(InitWeights w);

// Image-classifier fine-tuning parameters.
struct ClassifierConfig {
  double learning_rate = 1e-4;
  int batch_size = 32;
  Loss loss = Loss::CategoricalCrossEntropy;
  Optimizer optimizer = Optimizer::Adam;
  int epochs = 500;
  ClassifierBackbone backbone = ClassifierBackbone::InceptionV3;
  int num_classes = 5;
  std::uint64_t seed = 0;
};

// Instance-segmenter fine-tuning parameters: a heads-only phase followed by
// an all-layers phase.
struct SegmenterConfig {
  double lr_heads = 1e-3;
  double lr_all = 1e-4;
  int epochs_heads = 5;
  int epochs_all = 35;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  SegmenterBackbone backbone = SegmenterBackbone::ResNet101;
  InitWeights init_weights = InitWeights::ModaNet;
  // Model directory whose backbone weights seed training. Never fetched
  // implicitly; empty means a seeded random initialisation.
  std::string init_weights_path;
  std::uint64_t seed = 0;
  // Pixel sampling for the native per-pixel backend.
  int pixels_per_image = 256;
  int pixel_batch = 64;
  // Components smaller than this fraction of the image are not reported.
  double min_component_fraction = 0.005;
};

// JSON round trip. Parsing starts from `base` and overrides present keys;
// throws kInvalidArgument on bad values or unknown keys.
std::string to_json(const ClassifierConfig& cfg);
std::string to_json(const SegmenterConfig& cfg);
ClassifierConfig parse_classifier_config(std::string_view json_text,
                                         ClassifierConfig base = {});
SegmenterConfig parse_segmenter_config(std::string_view json_text,
                                       SegmenterConfig base = {});

// Backbone input conventions recorded in classifier artifacts.
struct InputConvention {
  int input_size = 299;
  std::string normalization;  // "tf" ([-1, 1]) or "caffe" (BGR, mean-subtracted)
};
InputConvention input_convention(ClassifierBackbone b);

// ---------------------------------------------------------------------------
// Outputs

// One garment hypothesis: mask, box, class and confidence. box always
// equals mask_to_bbox(mask).
struct Detection {
  BinaryMask mask;
  BBox box;
  GarmentClass cls = GarmentClass::Top;
  double score = 0.0;
};

// Throws kEmptyMask or kInvalidArgument (score outside [0, 1]).
Detection make_detection(BinaryMask mask, GarmentClass cls, double score);
// Throws kInvalidArgument if the invariants do not hold.
void check_detection(const Detection& d);

struct Classification {
  ImageClassLabel label = ImageClassLabel::Top;
  double score = 0.0;
  std::vector<double> scores;  // indexed like labels_for(mode)
};

// ---------------------------------------------------------------------------
// Backend contracts

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string name() const = 0;
  virtual ClassifierMode mode() const = 0;
  virtual bool concurrent_safe() const { return true; }

  // Validates the score vector (length, normalisation) and reports its
  // argmax. Throws kBackendFailure on a contract violation.
  Classification classify(const Image& img) const;

 protected:
  virtual std::vector<double> score_vector(const Image& img) const = 0;
};

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual std::string name() const = 0;
  virtual bool concurrent_safe() const { return true; }

  // Sorted by descending score (stable). Throws kBackendFailure when a
  // detection violates its invariants.
  std::vector<Detection> detect(const Image& img) const;

 protected:
  virtual std::vector<Detection> raw_detections(const Image& img) const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic mocks

// Pinned label; the remaining probability mass is spread evenly. Also
// accepts an explicit score vector.
class FixedClassifier final : public ClassifierBackend {
 public:
  FixedClassifier(ImageClassLabel label, double score,
                  ClassifierMode mode = ClassifierMode::FiveClass);
  FixedClassifier(std::vector<double> scores, ClassifierMode mode);

  std::string name() const override;
  ClassifierMode mode() const override { return mode_; }

 protected:
  std::vector<double> score_vector(const Image&) const override { return scores_; }

 private:
  std::vector<double> scores_;
  ClassifierMode mode_;
};

// Box given as fractions of the image size, [x0, x1) x [y0, y1).
struct RelativeBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

struct MockDetection {
  GarmentClass cls = GarmentClass::Top;
  double score = 1.0;
  RelativeBox box;
};

BBox to_pixel_box(const RelativeBox& box, int width, int height);

// Emits filled rectangles.
class FixedSegmenter final : public SegmenterBackend {
 public:
  explicit FixedSegmenter(std::vector<MockDetection> detections, std::string name = "mock:fixed");
  std::string name() const override { return name_; }

 protected:
  std::vector<Detection> raw_detections(const Image& img) const override;

 private:
  std::vector<MockDetection> detections_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Native trainable backends

struct EpochRecord {
  int epoch = 0;             // 1-based
  std::string phase;         // "train" for the classifier, "heads"/"all" for the segmenter
  bool phase_start = false;
  double lr = 0.0;
  double loss = 0.0;
  double metric = 0.0;       // training accuracy
  std::string optimizer;
  int batch_size = 0;
  std::string trainable;     // "head", "heads" or "all"
  double backbone_delta = 0.0;  // L2 norm of the backbone change this epoch
};

// One JSON object per line.
std::string to_jsonl(std::span<const EpochRecord> log);

struct LabeledImage {
  Image image;
  ImageClassLabel label = ImageClassLabel::Top;
};

// Pooled-colour descriptor over a fixed grid, normalised per the backbone's
// input convention, followed by a trainable softmax head.
class NativeClassifier final : public ClassifierBackend {
 public:
  static constexpr int kGrid = 8;
  static constexpr int kFeatures = kGrid * kGrid * 3;

  NativeClassifier(ClassifierConfig cfg, std::vector<double> weights);

  std::string name() const override { return "native-classifier"; }
  ClassifierMode mode() const override;

  const ClassifierConfig& config() const { return cfg_; }
  // Row-major [classes x (features + 1)], bias last.
  const std::vector<double>& weights() const { return weights_; }

  static std::vector<double> features(const Image& img, ClassifierBackbone backbone);

  void save(const std::filesystem::path& dir) const;
  static std::shared_ptr<NativeClassifier> load(const std::filesystem::path& dir);

 protected:
  std::vector<double> score_vector(const Image& img) const override;

 private:
  ClassifierConfig cfg_;
  std::vector<double> weights_;
};

struct TrainedClassifier {
  std::shared_ptr<NativeClassifier> model;
  std::vector<EpochRecord> log;
};

// Adam + categorical cross-entropy on minibatches. Throws kEmptyClass,
// kMixedModes, kEmptyDataset, kInvalidArgument.
TrainedClassifier train_classifier(std::span<const LabeledImage> dataset,
                                   const ClassifierConfig& cfg);

struct SegmentationSample {
  Image image;
  AnnotatedImage annotations;
};

// Per-pixel network: a tanh feature layer standing in for the backbone and a
// softmax head over {background, top, bottom}. Detections are the connected
// components of each garment class's argmax map.
class NativeSegmenter final : public SegmenterBackend {
 public:
  static constexpr int kInputs = 9;
  static constexpr int kHidden = 16;
  static constexpr int kOutputs = 3;

  struct Weights {
    std::vector<double> backbone;  // [kHidden x (kInputs + 1)]
    std::vector<double> head;      // [kOutputs x (kHidden + 1)]
  };

  NativeSegmenter(SegmenterConfig cfg, Weights weights);

  std::string name() const override { return "native-segmenter"; }
  const SegmenterConfig& config() const { return cfg_; }
  const Weights& weights() const { return weights_; }

  // Row-major [pixels x kInputs].
  static std::vector<double> pixel_features(const Image& img);
  // Row-major [pixels x kOutputs] class probabilities.
  std::vector<double> pixel_probabilities(const Image& img) const;

  void save(const std::filesystem::path& dir) const;
  static std::shared_ptr<NativeSegmenter> load(const std::filesystem::path& dir);

 protected:
  std::vector<Detection> raw_detections(const Image& img) const override;

 private:
  SegmenterConfig cfg_;
  Weights weights_;
};

struct TrainedSegmenter {
  std::shared_ptr<NativeSegmenter> model;
  std::vector<EpochRecord> log;
};

// Momentum SGD with weight decay: heads only for epochs_heads at lr_heads,
// then every layer for epochs_all at lr_all. Throws kEmptyDataset,
// kDimensionMismatch, kBackendUnavailable (unreadable init weights).
TrainedSegmenter train_segmenter(std::span<const SegmentationSample> dataset,
                                 const SegmenterConfig& cfg);

// ---------------------------------------------------------------------------
// Registry
//
// Classifiers: "mock:fixed:<Label>@<score>[:4]" or a model directory.
// Segmenters: "mock:none", "mock:halves",
//   "mock:fixed:<class>@<score>@<x0>,<y0>,<x1>,<y1>[;...]" or a model
//   directory. Throws kBackendUnavailable.
std::shared_ptr<const ClassifierBackend> make_classifier(const std::string& spec);
std::shared_ptr<const SegmenterBackend> make_segmenter(const std::string& spec);

}  // namespace garmentseg
