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
#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "garmentseg/error.hpp"
#include "garmentseg/models.hpp"
#include "model_io.hpp"
#include "rng.hpp"

namespace garmentseg {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-7;

// ImageNet channel means used by caffe-style preprocessing (B, G, R).
constexpr double kCaffeMeanBgr[3] = {103.939, 116.779, 123.68};

void softmax_inplace(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

// logits = W [x; 1]
void head_logits(const std::vector<double>& w, std::span<const double> x, std::span<double> out) {
  const std::size_t cols = x.size() + 1;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* row = w.data() + k * cols;
    double acc = row[cols - 1];
    for (std::size_t i = 0; i < x.size(); ++i) acc += row[i] * x[i];
    out[k] = acc;
  }
}

}  // namespace

NativeClassifier::NativeClassifier(ClassifierConfig cfg, std::vector<double> weights)
    : cfg_(cfg), weights_(std::move(weights)) {
  const std::size_t classes = labels_for(mode()).size();
  if (weights_.size() != classes * (kFeatures + 1)) {
    fail(ErrorCode::kInvalidArgument, "classifier weight count does not match its mode");
  }
}

ClassifierMode NativeClassifier::mode() const { return mode_from_class_count(cfg_.num_classes); }

std::vector<double> NativeClassifier::features(const Image& img, ClassifierBackbone backbone) {
  if (img.empty()) fail(ErrorCode::kDecodeFailure, "cannot classify an empty image");
  const bool caffe = input_convention(backbone).normalization == "caffe";
  std::vector<double> f;
  f.reserve(kFeatures);
  for (int gy = 0; gy < kGrid; ++gy) {
    const int y0 = std::min(gy * img.height() / kGrid, img.height() - 1);
    const int y1 = std::max(y0 + 1, (gy + 1) * img.height() / kGrid);
    for (int gx = 0; gx < kGrid; ++gx) {
      const int x0 = std::min(gx * img.width() / kGrid, img.width() - 1);
      const int x1 = std::max(x0 + 1, (gx + 1) * img.width() / kGrid);
      double sum[3] = {0.0, 0.0, 0.0};
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          for (int c = 0; c < 3; ++c) sum[c] += img.channel(x, y, c);
        }
      }
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));
      if (caffe) {
        for (int c = 2; c >= 0; --c) f.push_back(sum[c] / n - kCaffeMeanBgr[2 - c]);
      } else {
        for (int c = 0; c < 3; ++c) f.push_back(sum[c] / n / 127.5 - 1.0);
      }
    }
  }
  return f;
}

std::vector<double> NativeClassifier::score_vector(const Image& img) const {
  const std::vector<double> x = features(img, cfg_.backbone);
  std::vector<double> z(labels_for(mode()).size());
  head_logits(weights_, x, z);
  softmax_inplace(z);
  return z;
}

void NativeClassifier::save(const std::filesystem::path& dir) const {
  ordered_json meta;
  meta["kind"] = "native-classifier";
  meta["mode"] = cfg_.num_classes;
  meta["classes"] = json::array();
  for (ImageClassLabel l : labels_for(mode())) meta["classes"].push_back(to_string(l));
  meta["backbone"] = to_string(cfg_.backbone);
  meta["config"] = ordered_json::parse(to_json(cfg_));
  const InputConvention conv = input_convention(cfg_.backbone);
  meta["preprocessing"] = {{"input_size", conv.input_size},
                           {"normalization", conv.normalization},
                           {"feature_grid", kGrid}};
  detail::write_text(dir / "model.json", meta.dump(2) + "\n");
  ordered_json weights;
  weights["head"] = weights_;
  detail::write_text(dir / "weights.json", weights.dump() + "\n");
}

std::shared_ptr<NativeClassifier> NativeClassifier::load(const std::filesystem::path& dir) {
  const json meta = detail::read_json(dir / "model.json", ErrorCode::kBackendUnavailable);
  const json weights = detail::read_json(dir / "weights.json", ErrorCode::kBackendUnavailable);
  try {
    if (meta.at("kind") != "native-classifier") {
      fail(ErrorCode::kBackendUnavailable, dir.string() + " is not a classifier model");
    }
    const ClassifierConfig cfg = parse_classifier_config(meta.at("config").dump());
    return std::make_shared<NativeClassifier>(cfg, weights.at("head").get<std::vector<double>>());
  } catch (const json::exception& e) {
    fail(ErrorCode::kBackendUnavailable, "corrupt model at " + dir.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBackendUnavailable) throw;
    fail(ErrorCode::kBackendUnavailable, "corrupt model at " + dir.string() + ": " + e.what());
  }
}

TrainedClassifier train_classifier(std::span<const LabeledImage> dataset,
                                   const ClassifierConfig& cfg) {
  const ClassifierMode mode = mode_from_class_count(cfg.num_classes);
  if (dataset.empty()) fail(ErrorCode::kEmptyDataset, "classifier training set is empty");
  if (cfg.batch_size <= 0 || cfg.epochs <= 0 || !(cfg.learning_rate > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "classifier config has a non-positive schedule");
  }
  const std::size_t classes = labels_for(mode).size();
  std::vector<std::size_t> per_class(classes, 0);
  std::vector<std::vector<double>> xs;
  std::vector<std::size_t> ys;
  xs.reserve(dataset.size());
  for (const LabeledImage& s : dataset) {
    const std::size_t y = label_index(s.label, mode);
    ++per_class[y];
    ys.push_back(y);
    xs.push_back(NativeClassifier::features(s.image, cfg.backbone));
  }
  for (std::size_t k = 0; k < classes; ++k) {
    if (per_class[k] == 0) {
      fail(ErrorCode::kEmptyClass,
           "no training samples for class " + std::string(to_string(labels_for(mode)[k])));
    }
  }

  const std::size_t cols = NativeClassifier::kFeatures + 1;
  std::vector<double> w(classes * cols, 0.0);
  std::vector<double> m(w.size(), 0.0);
  std::vector<double> v(w.size(), 0.0);
  std::vector<double> grad(w.size());
  std::vector<double> z(classes);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  detail::Rng rng(cfg.seed);
  long long step = 0;

  TrainedClassifier out;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        head_logits(w, xs[i], z);
        softmax_inplace(z);
        loss_sum += -std::log(std::max(z[ys[i]], 1e-300));
        for (std::size_t k = 0; k < classes; ++k) {
          const double d = z[k] - (k == ys[i] ? 1.0 : 0.0);
          double* g = grad.data() + k * cols;
          for (std::size_t f = 0; f < xs[i].size(); ++f) g[f] += d * xs[i][f];
          g[cols - 1] += d;
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
      for (std::size_t p = 0; p < w.size(); ++p) {
        const double g = grad[p] * inv;
        m[p] = kAdamBeta1 * m[p] + (1.0 - kAdamBeta1) * g;
        v[p] = kAdamBeta2 * v[p] + (1.0 - kAdamBeta2) * g * g;
        w[p] -= cfg.learning_rate * (m[p] / c1) / (std::sqrt(v[p] / c2) + kAdamEpsilon);
      }
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      head_logits(w, xs[i], z);
      if (static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()) == ys[i]) ++correct;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.phase = "train";
    rec.phase_start = epoch == 1;
    rec.lr = cfg.learning_rate;
    rec.loss = loss_sum / static_cast<double>(xs.size());
    rec.metric = static_cast<double>(correct) / static_cast<double>(xs.size());
    rec.optimizer = std::string(to_string(cfg.optimizer));
    rec.batch_size = cfg.batch_size;
    rec.trainable = "head";
    out.log.push_back(rec);
  }
  out.model = std::make_shared<NativeClassifier>(cfg, std::move(w));
  return out;
}

}  // namespace garmentseg
