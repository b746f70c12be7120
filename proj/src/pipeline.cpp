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
#include "garmentseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "model_io.hpp"

namespace garmentseg {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Serializer {
  std::mutex classifier;
  std::mutex segmenter;
  std::mutex foreground;
};

// Locks `m` only when the backend cannot take concurrent calls.
std::unique_lock<std::mutex> guard(Serializer* s, std::mutex Serializer::*m, bool safe) {
  if (s == nullptr || safe) return {};
  return std::unique_lock<std::mutex>(s->*m);
}

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDecodeFailure) throw;
    fail(ErrorCode::kBackendFailure, std::string("stage '") + stage + "': " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorCode::kBackendFailure, std::string("stage '") + stage + "': " + e.what());
  }
}

PipelineOutput run_impl(const Image& img, const std::string& image_id, const Backends& backends,
                        const PipelineConfig& cfg, Serializer* serial) {
  if (!backends.classifier || !backends.segmenter || !backends.foreground) {
    fail(ErrorCode::kBackendUnavailable, "pipeline backends are not initialised");
  }
  if (img.empty()) fail(ErrorCode::kDecodeFailure, "image \"" + image_id + "\" is empty");

  PipelineOutput out;
  out.image_id = image_id;

  const PreprocessResult pre = in_stage("preprocess", [&] {
    auto lock = guard(serial, &Serializer::foreground, backends.foreground->concurrent_safe());
    return preprocess(img, *backends.foreground, cfg.preprocess);
  });
  out.foreground_fraction = pre.foreground_fraction;
  if (pre.destroyed) {
    out.destroyed = true;
    out.skipped = true;
    return out;
  }

  const Classification cls = in_stage("classify", [&] {
    auto lock = guard(serial, &Serializer::classifier, backends.classifier->concurrent_safe());
    return backends.classifier->classify(cfg.classify_on_cleaned ? pre.cleaned_image : img);
  });
  out.route = cls.label;
  out.route_score = cls.score;
  out.route_scores = cls.scores;

  switch (route_action(cls.label)) {
    case RouteAction::Skip:
      out.skipped = true;
      break;
    case RouteAction::Passthrough: {
      const GarmentClass garment =
          cls.label == ImageClassLabel::Top ? GarmentClass::Top : GarmentClass::Bottom;
      out.garments.push_back(make_detection(pre.foreground_mask, garment, cls.score));
      break;
    }
    case RouteAction::Segment: {
      std::vector<Detection> dets = in_stage("segment", [&] {
        auto lock = guard(serial, &Serializer::segmenter, backends.segmenter->concurrent_safe());
        return backends.segmenter->detect(img);
      });
      bool seen[2] = {false, false};
      for (Detection& d : dets) {
        const auto slot = static_cast<std::size_t>(d.cls);
        if (seen[slot] || d.score < cfg.score_floor) continue;
        seen[slot] = true;
        out.garments.push_back(std::move(d));
      }
      break;
    }
  }
  return out;
}

ordered_json bbox_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

}  // namespace

RouteAction route_action(ImageClassLabel label) {
  switch (label) {
    case ImageClassLabel::FullBody:
    case ImageClassLabel::HalfBody:
      return RouteAction::Segment;
    case ImageClassLabel::Top:
    case ImageClassLabel::Bottom:
      return RouteAction::Passthrough;
    case ImageClassLabel::Accessories:
      return RouteAction::Skip;
  }
  return RouteAction::Skip;
}

PipelineOutput run_pipeline(const Image& img, const std::string& image_id,
                            const Backends& backends, const PipelineConfig& cfg) {
  return run_impl(img, image_id, backends, cfg, nullptr);
}

std::string safe_file_stem(const std::string& image_id) {
  std::string s = image_id.empty() ? std::string("image") : image_id;
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (s == "." || s == "..") s = "_";
  return s;
}

namespace {

ordered_json output_json(const PipelineOutput& out, const std::vector<std::string>& mask_paths) {
  ordered_json j;
  j["image_id"] = out.image_id;
  j["route"] = out.route ? ordered_json(to_string(*out.route)) : ordered_json(nullptr);
  j["route_score"] = out.route_score;
  ordered_json scores = ordered_json::object();
  if (out.route) {
    const ClassifierMode mode = out.route_scores.size() == 4 ? ClassifierMode::FourClass
                                                             : ClassifierMode::FiveClass;
    const auto labels = labels_for(mode);
    for (std::size_t i = 0; i < out.route_scores.size() && i < labels.size(); ++i) {
      scores[std::string(to_string(labels[i]))] = out.route_scores[i];
    }
  }
  j["route_scores"] = std::move(scores);
  j["skipped"] = out.skipped;
  j["destroyed"] = out.destroyed;
  j["foreground_fraction"] = out.foreground_fraction;
  ordered_json garments = ordered_json::array();
  for (std::size_t i = 0; i < out.garments.size(); ++i) {
    const Detection& d = out.garments[i];
    ordered_json g;
    g["class"] = to_string(d.cls);
    g["score"] = d.score;
    g["bbox"] = bbox_json(d.box);
    g["mask_png"] = i < mask_paths.size() ? ordered_json(mask_paths[i]) : ordered_json(nullptr);
    garments.push_back(std::move(g));
  }
  j["garments"] = std::move(garments);
  return j;
}

}  // namespace

std::string to_json(const PipelineOutput& out, const std::vector<std::string>& mask_paths) {
  return output_json(out, mask_paths).dump(2) + "\n";
}

std::string to_json(const BatchSummary& summary) {
  ordered_json j;
  j["images"] = summary.images;
  j["processed"] = summary.processed;
  ordered_json counts = ordered_json::object();
  for (ImageClassLabel l : kAllImageClassLabels) {
    const auto it = summary.route_counts.find(std::string(to_string(l)));
    counts[std::string(to_string(l))] = it == summary.route_counts.end() ? 0 : it->second;
  }
  j["route_counts"] = std::move(counts);
  j["skipped"] = summary.skipped;
  j["destroyed"] = summary.destroyed;
  ordered_json failures = ordered_json::array();
  for (const BatchFailure& f : summary.failures) {
    failures.push_back({{"id", f.image_id}, {"error", to_string(f.code)}, {"message", f.message}});
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

BatchSummary run_batch(const Manifest& manifest, const std::filesystem::path& manifest_dir,
                       const Backends& backends, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir, const OverlayOptions* overlay) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  const std::size_t n = manifest.images.size();
  struct Slot {
    std::optional<PipelineOutput> output;
    std::vector<std::string> mask_files;
    std::optional<BatchFailure> failure;
  };
  std::vector<Slot> slots(n);
  Serializer serial;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const AnnotatedImage& rec = manifest.images[i];
      Slot& slot = slots[i];
      try {
        const Image img = load_image(resolve_image_path(manifest_dir, rec.image_path));
        PipelineOutput out = run_impl(img, rec.image_id, backends, cfg, &serial);
        const std::string stem = safe_file_stem(rec.image_id);
        for (const Detection& d : out.garments) {
          const std::string file = stem + "_" + std::string(to_string(d.cls)) + ".png";
          save_mask_png(out_dir / file, d.mask);
          slot.mask_files.push_back(file);
        }
        detail::write_text(out_dir / (stem + ".json"), to_json(out, slot.mask_files));
        if (overlay != nullptr) {
          save_image(out_dir / (stem + "_overlay.png"), render_overlay(img, out, *overlay));
        }
        slot.output = std::move(out);
      } catch (const Error& e) {
        slot.failure = BatchFailure{rec.image_id, e.code(), e.what()};
      } catch (const std::exception& e) {
        slot.failure = BatchFailure{rec.image_id, ErrorCode::kBackendFailure, e.what()};
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  BatchSummary summary;
  summary.images = n;
  for (ImageClassLabel l : kAllImageClassLabels) summary.route_counts[std::string(to_string(l))] = 0;
  ordered_json interchange;
  interchange["images"] = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& slot = slots[i];
    if (slot.failure) {
      summary.failures.push_back(*slot.failure);
      continue;
    }
    const PipelineOutput& out = *slot.output;
    ++summary.processed;
    if (out.route) ++summary.route_counts[std::string(to_string(*out.route))];
    if (out.skipped) ++summary.skipped;
    if (out.destroyed) ++summary.destroyed;
    ordered_json dets = ordered_json::array();
    for (std::size_t g = 0; g < out.garments.size(); ++g) {
      const Detection& d = out.garments[g];
      dets.push_back({{"class", to_string(d.cls)},
                      {"score", d.score},
                      {"bbox", bbox_json(d.box)},
                      {"mask_png", slot.mask_files[g]}});
    }
    interchange["images"].push_back({{"id", out.image_id}, {"detections", std::move(dets)}});
  }
  detail::write_text(out_dir / "detections.json", interchange.dump(2) + "\n");
  detail::write_text(out_dir / "summary.json", to_json(summary));
  return summary;
}

}  // namespace garmentseg
