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
#include <array>
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

constexpr int kIn = NativeSegmenter::kInputs;
constexpr int kHid = NativeSegmenter::kHidden;
constexpr int kOut = NativeSegmenter::kOutputs;
constexpr std::size_t kBackboneSize = static_cast<std::size_t>(kHid) * (kIn + 1);
constexpr std::size_t kHeadSize = static_cast<std::size_t>(kOut) * (kHid + 1);

// Output channel 0 is background; 1 + GarmentClass otherwise.
int channel_of(GarmentClass c) { return c == GarmentClass::Top ? 1 : 2; }

std::array<double, 3> border_median(const Image& img) {
  std::array<std::vector<std::uint8_t>, 3> border;
  auto sample = [&](int x, int y) {
    for (int c = 0; c < 3; ++c) border[static_cast<std::size_t>(c)].push_back(img.channel(x, y, c));
  };
  for (int x = 0; x < img.width(); ++x) {
    sample(x, 0);
    sample(x, img.height() - 1);
  }
  for (int y = 0; y < img.height(); ++y) {
    sample(0, y);
    sample(img.width() - 1, y);
  }
  std::array<double, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    auto& v = border[c];
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    out[c] = v[v.size() / 2];
  }
  return out;
}

struct Activations {
  std::array<double, kHid> hidden{};
  std::array<double, kOut> probs{};
};

void forward(const NativeSegmenter::Weights& w, const double* x, Activations& a) {
  for (int j = 0; j < kHid; ++j) {
    const double* row = w.backbone.data() + static_cast<std::size_t>(j) * (kIn + 1);
    double acc = row[kIn];
    for (int i = 0; i < kIn; ++i) acc += row[i] * x[i];
    a.hidden[static_cast<std::size_t>(j)] = std::tanh(acc);
  }
  double m = -1e300;
  for (int k = 0; k < kOut; ++k) {
    const double* row = w.head.data() + static_cast<std::size_t>(k) * (kHid + 1);
    double acc = row[kHid];
    for (int j = 0; j < kHid; ++j) acc += row[j] * a.hidden[static_cast<std::size_t>(j)];
    a.probs[static_cast<std::size_t>(k)] = acc;
    m = std::max(m, acc);
  }
  double sum = 0.0;
  for (double& p : a.probs) {
    p = std::exp(p - m);
    sum += p;
  }
  for (double& p : a.probs) p /= sum;
}

NativeSegmenter::Weights initial_weights(const SegmenterConfig& cfg) {
  NativeSegmenter::Weights w;
  w.head.assign(kHeadSize, 0.0);
  if (!cfg.init_weights_path.empty()) {
    try {
      w.backbone = NativeSegmenter::load(cfg.init_weights_path)->weights().backbone;
    } catch (const Error& e) {
      fail(ErrorCode::kBackendUnavailable,
           "cannot load initial weights from " + cfg.init_weights_path + ": " + e.what());
    }
    return w;
  }
  detail::Rng rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(cfg.init_weights) + 1);
  const double limit = std::sqrt(6.0 / (kIn + kHid));
  w.backbone.assign(kBackboneSize, 0.0);
  for (int j = 0; j < kHid; ++j) {
    for (int i = 0; i < kIn; ++i) {
      w.backbone[static_cast<std::size_t>(j) * (kIn + 1) + static_cast<std::size_t>(i)] =
          (2.0 * rng.uniform() - 1.0) * limit;
    }
  }
  return w;
}

}  // namespace

NativeSegmenter::NativeSegmenter(SegmenterConfig cfg, Weights weights)
    : cfg_(std::move(cfg)), weights_(std::move(weights)) {
  if (weights_.backbone.size() != kBackboneSize || weights_.head.size() != kHeadSize) {
    fail(ErrorCode::kInvalidArgument, "segmenter weight shapes are wrong");
  }
}

std::vector<double> NativeSegmenter::pixel_features(const Image& img) {
  if (img.empty()) fail(ErrorCode::kDecodeFailure, "cannot segment an empty image");
  const int w = img.width();
  const int h = img.height();
  // Summed-area table per channel for the 5x5 local mean.
  std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1) * 3, 0.0);
  auto sat_at = [&](int x, int y, int c) -> double& {
    return sat[(static_cast<std::size_t>(y) * (w + 1) + static_cast<std::size_t>(x)) * 3 +
               static_cast<std::size_t>(c)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        sat_at(x + 1, y + 1, c) = img.channel(x, y, c) + sat_at(x, y + 1, c) +
                                  sat_at(x + 1, y, c) - sat_at(x, y, c);
      }
    }
  }
  const std::array<double, 3> bg = border_median(img);
  std::vector<double> f(img.pixel_count() * kIn);
  std::size_t o = 0;
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - 2);
    const int y1 = std::min(h, y + 3);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - 2);
      const int x1 = std::min(w, x + 3);
      const double area = static_cast<double>((x1 - x0) * (y1 - y0));
      double dist = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double v = img.channel(x, y, c);
        f[o + static_cast<std::size_t>(c)] = v / 127.5 - 1.0;
        const double local =
            (sat_at(x1, y1, c) - sat_at(x0, y1, c) - sat_at(x1, y0, c) + sat_at(x0, y0, c)) / area;
        f[o + 3 + static_cast<std::size_t>(c)] = local / 127.5 - 1.0;
        dist += (v - bg[static_cast<std::size_t>(c)]) * (v - bg[static_cast<std::size_t>(c)]);
      }
      f[o + 6] = (x + 0.5) / w * 2.0 - 1.0;
      f[o + 7] = (y + 0.5) / h * 2.0 - 1.0;
      f[o + 8] = std::sqrt(dist) / 255.0;
      o += kIn;
    }
  }
  return f;
}

std::vector<double> NativeSegmenter::pixel_probabilities(const Image& img) const {
  const std::vector<double> f = pixel_features(img);
  std::vector<double> out(img.pixel_count() * kOut);
  Activations a;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    forward(weights_, f.data() + p * kIn, a);
    std::copy(a.probs.begin(), a.probs.end(), out.begin() + static_cast<std::ptrdiff_t>(p * kOut));
  }
  return out;
}

std::vector<Detection> NativeSegmenter::raw_detections(const Image& img) const {
  const std::vector<double> probs = pixel_probabilities(img);
  const int w = img.width();
  const int h = img.height();
  const double min_size =
      std::max(1.0, cfg_.min_component_fraction * static_cast<double>(img.pixel_count()));
  std::vector<Detection> out;
  for (GarmentClass cls : kGarmentClasses) {
    const int ch = channel_of(cls);
    BinaryMask argmax(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double* p = probs.data() + (static_cast<std::size_t>(y) * w + x) * kOut;
        if (std::max_element(p, p + kOut) - p == ch) argmax.set(x, y);
      }
    }
    const ComponentLabels cl = label_components(argmax);
    for (const Component& comp : cl.components) {
      if (static_cast<double>(comp.size) < min_size) continue;
      BinaryMask m(w, h);
      double score = 0.0;
      for (int y = comp.bounds.y_min; y <= comp.bounds.y_max; ++y) {
        for (int x = comp.bounds.x_min; x <= comp.bounds.x_max; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          if (cl.labels[i] != comp.label) continue;
          m.set(x, y);
          score += probs[i * kOut + static_cast<std::size_t>(ch)];
        }
      }
      score = std::clamp(score / static_cast<double>(comp.size), 0.0, 1.0);
      out.push_back(make_detection(std::move(m), cls, score));
    }
  }
  return out;
}

void NativeSegmenter::save(const std::filesystem::path& dir) const {
  ordered_json meta;
  meta["kind"] = "native-segmenter";
  meta["classes"] = {"background", "top", "bottom"};
  meta["backbone"] = to_string(cfg_.backbone);
  meta["config"] = ordered_json::parse(to_json(cfg_));
  meta["preprocessing"] = {{"pixel_features", kIn}, {"hidden_units", kHid}};
  detail::write_text(dir / "model.json", meta.dump(2) + "\n");
  ordered_json weights;
  weights["backbone"] = weights_.backbone;
  weights["head"] = weights_.head;
  detail::write_text(dir / "weights.json", weights.dump() + "\n");
}

std::shared_ptr<NativeSegmenter> NativeSegmenter::load(const std::filesystem::path& dir) {
  const json meta = detail::read_json(dir / "model.json", ErrorCode::kBackendUnavailable);
  const json weights = detail::read_json(dir / "weights.json", ErrorCode::kBackendUnavailable);
  try {
    if (meta.at("kind") != "native-segmenter") {
      fail(ErrorCode::kBackendUnavailable, dir.string() + " is not a segmenter model");
    }
    const SegmenterConfig cfg = parse_segmenter_config(meta.at("config").dump());
    Weights w{weights.at("backbone").get<std::vector<double>>(),
              weights.at("head").get<std::vector<double>>()};
    return std::make_shared<NativeSegmenter>(cfg, std::move(w));
  } catch (const json::exception& e) {
    fail(ErrorCode::kBackendUnavailable, "corrupt model at " + dir.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBackendUnavailable) throw;
    fail(ErrorCode::kBackendUnavailable, "corrupt model at " + dir.string() + ": " + e.what());
  }
}

TrainedSegmenter train_segmenter(std::span<const SegmentationSample> dataset,
                                 const SegmenterConfig& cfg) {
  if (dataset.empty()) fail(ErrorCode::kEmptyDataset, "segmenter training set is empty");
  std::size_t annotations = 0;
  for (const SegmentationSample& s : dataset) {
    if (s.image.width() != s.annotations.width || s.image.height() != s.annotations.height) {
      fail(ErrorCode::kDimensionMismatch,
           "image \"" + s.annotations.image_id + "\" does not match its annotation size");
    }
    annotations += s.annotations.annotations.size();
  }
  if (annotations == 0) fail(ErrorCode::kEmptyDataset, "segmenter training set has no annotations");

  struct Prepared {
    std::vector<double> features;
    std::vector<std::uint8_t> target;
    std::vector<std::uint32_t> foreground;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(dataset.size());
  for (const SegmentationSample& s : dataset) {
    Prepared p;
    p.features = NativeSegmenter::pixel_features(s.image);
    p.target.assign(s.image.pixel_count(), 0);
    for (const PolygonAnnotation& poly : s.annotations.annotations) {
      const BinaryMask m = rasterize(poly, s.image.width(), s.image.height());
      const auto bits = m.bits();
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) p.target[i] = static_cast<std::uint8_t>(channel_of(poly.label));
      }
    }
    for (std::size_t i = 0; i < p.target.size(); ++i) {
      if (p.target[i] != 0) p.foreground.push_back(static_cast<std::uint32_t>(i));
    }
    prepared.push_back(std::move(p));
  }

  NativeSegmenter::Weights w = initial_weights(cfg);
  std::vector<double> vel_backbone(kBackboneSize, 0.0);
  std::vector<double> vel_head(kHeadSize, 0.0);
  std::vector<double> grad_backbone(kBackboneSize);
  std::vector<double> grad_head(kHeadSize);
  detail::Rng rng(cfg.seed);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> samples;  // (image, pixel)
  Activations a;

  TrainedSegmenter out;
  const int total_epochs = cfg.epochs_heads + cfg.epochs_all;
  for (int epoch = 1; epoch <= total_epochs; ++epoch) {
    const bool heads_only = epoch <= cfg.epochs_heads;
    const bool phase_start = epoch == 1 || epoch == cfg.epochs_heads + 1;
    const double lr = heads_only ? cfg.lr_heads : cfg.lr_all;
    if (phase_start) {
      std::fill(vel_backbone.begin(), vel_backbone.end(), 0.0);
      std::fill(vel_head.begin(), vel_head.end(), 0.0);
    }
    const std::vector<double> backbone_before = w.backbone;

    // Half the samples come from annotated pixels so small garments are
    // not drowned out by background.
    samples.clear();
    for (std::size_t img = 0; img < prepared.size(); ++img) {
      const Prepared& p = prepared[img];
      const std::size_t n = p.target.size();
      for (int k = 0; k < cfg.pixels_per_image; ++k) {
        std::uint32_t pixel;
        if (k % 2 == 1 && !p.foreground.empty()) {
          pixel = p.foreground[rng.below(p.foreground.size())];
        } else {
          pixel = static_cast<std::uint32_t>(rng.below(n));
        }
        samples.emplace_back(static_cast<std::uint32_t>(img), pixel);
      }
    }
    rng.shuffle(samples);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(cfg.pixel_batch)) {
      const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(cfg.pixel_batch));
      std::fill(grad_head.begin(), grad_head.end(), 0.0);
      std::fill(grad_backbone.begin(), grad_backbone.end(), 0.0);
      for (std::size_t s = start; s < end; ++s) {
        const Prepared& p = prepared[samples[s].first];
        const std::uint32_t pixel = samples[s].second;
        const double* x = p.features.data() + static_cast<std::size_t>(pixel) * kIn;
        const int target = p.target[pixel];
        forward(w, x, a);
        loss_sum += -std::log(std::max(a.probs[static_cast<std::size_t>(target)], 1e-300));
        if (std::max_element(a.probs.begin(), a.probs.end()) - a.probs.begin() == target) ++correct;

        std::array<double, kOut> dz{};
        for (int k = 0; k < kOut; ++k) {
          dz[static_cast<std::size_t>(k)] = a.probs[static_cast<std::size_t>(k)] - (k == target ? 1.0 : 0.0);
        }
        std::array<double, kHid> dh{};
        for (int k = 0; k < kOut; ++k) {
          const double d = dz[static_cast<std::size_t>(k)];
          double* g = grad_head.data() + static_cast<std::size_t>(k) * (kHid + 1);
          const double* row = w.head.data() + static_cast<std::size_t>(k) * (kHid + 1);
          for (int j = 0; j < kHid; ++j) {
            g[j] += d * a.hidden[static_cast<std::size_t>(j)];
            dh[static_cast<std::size_t>(j)] += d * row[j];
          }
          g[kHid] += d;
        }
        if (heads_only) continue;
        for (int j = 0; j < kHid; ++j) {
          const double hj = a.hidden[static_cast<std::size_t>(j)];
          const double dpre = dh[static_cast<std::size_t>(j)] * (1.0 - hj * hj);
          double* g = grad_backbone.data() + static_cast<std::size_t>(j) * (kIn + 1);
          for (int i = 0; i < kIn; ++i) g[i] += dpre * x[i];
          g[kIn] += dpre;
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      auto sgd = [&](std::vector<double>& params, std::vector<double>& vel,
                     const std::vector<double>& grad, int fan_in) {
        for (std::size_t i = 0; i < params.size(); ++i) {
          const bool is_bias = static_cast<int>(i % static_cast<std::size_t>(fan_in + 1)) == fan_in;
          const double g = grad[i] * inv + (is_bias ? 0.0 : cfg.weight_decay * params[i]);
          vel[i] = cfg.momentum * vel[i] - lr * g;
          params[i] += vel[i];
        }
      };
      sgd(w.head, vel_head, grad_head, kHid);
      if (!heads_only) sgd(w.backbone, vel_backbone, grad_backbone, kIn);
    }

    double delta = 0.0;
    for (std::size_t i = 0; i < kBackboneSize; ++i) {
      delta += (w.backbone[i] - backbone_before[i]) * (w.backbone[i] - backbone_before[i]);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.phase = heads_only ? "heads" : "all";
    rec.phase_start = phase_start;
    rec.lr = lr;
    rec.loss = loss_sum / static_cast<double>(samples.size());
    rec.metric = static_cast<double>(correct) / static_cast<double>(samples.size());
    rec.optimizer = "SGD";
    rec.batch_size = cfg.pixel_batch;
    rec.trainable = heads_only ? "heads" : "all";
    rec.backbone_delta = std::sqrt(delta);
    out.log.push_back(rec);
  }
  out.model = std::make_shared<NativeSegmenter>(cfg, std::move(w));
  return out;
}

}  // namespace garmentseg
