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
#include "garmentseg/commands.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "garmentseg/annotations.hpp"
#include "garmentseg/augmentation.hpp"
#include "garmentseg/error.hpp"
#include "garmentseg/evaluation.hpp"
#include "garmentseg/models.hpp"
#include "garmentseg/pipeline.hpp"
#include "garmentseg/preprocessing.hpp"
#include "model_io.hpp"

namespace garmentseg {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 9> kCommands = {
    "convert",         "split",         "preprocess",   "augment", "train-classifier",
    "train-segmenter", "classify-eval", "segment-eval", "run"};

// Typed access to an options object.
class Options {
 public:
  explicit Options(json j) : j_(std::move(j)) {}

  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  template <typename T>
  T get(const std::string& key) const {
    if (!has(key)) fail(ErrorCode::kInvalidArgument, "missing option \"" + key + "\"");
    try {
      return j_[key].get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::kInvalidArgument, "option \"" + key + "\" has the wrong type");
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  fs::path path(const std::string& key) const { return fs::path(get<std::string>(key)); }

  std::uint64_t seed() const { return get<std::uint64_t>("seed", 0); }

 private:
  json j_;
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

json merged_options(std::string_view name, std::string_view options_json) {
  json explicit_opts;
  try {
    explicit_opts = options_json.empty() ? json::object() : json::parse(options_json);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, std::string("options are not valid JSON: ") + e.what());
  }
  if (!explicit_opts.is_object()) fail(ErrorCode::kInvalidArgument, "options must be a JSON object");
  json base = json::object();
  if (explicit_opts.contains("config") && !explicit_opts["config"].is_null()) {
    if (!explicit_opts["config"].is_string()) {
      fail(ErrorCode::kInvalidArgument, "option \"config\" must be a file path");
    }
    const fs::path cfg_path = explicit_opts["config"].get<std::string>();
    json file = detail::read_json(cfg_path, ErrorCode::kInvalidArgument);
    if (!file.is_object()) fail(ErrorCode::kInvalidArgument, cfg_path.string() + " must hold an object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      const bool section = std::find(kCommands.begin(), kCommands.end(), it.key()) != kCommands.end();
      if (!section) base[it.key()] = it.value();
    }
    const std::string key(name);
    if (file.contains(key) && file[key].is_object()) base.merge_patch(file[key]);
    explicit_opts.erase("config");
  }
  base.merge_patch(explicit_opts);
  return base;
}

fs::path absolute_of(const fs::path& p) {
  std::error_code ec;
  fs::path a = fs::absolute(p, ec);
  return ec ? p : a.lexically_normal();
}

// Path string for `target` as seen from a manifest stored in `dir`.
std::string relative_to(const fs::path& target, const fs::path& dir) {
  const fs::path rel = absolute_of(target).lexically_relative(absolute_of(dir));
  return rel.empty() ? absolute_of(target).string() : rel.generic_string();
}

void rebase_paths(std::vector<AnnotatedImage>& images, const fs::path& from_dir,
                  const fs::path& to_dir) {
  for (AnnotatedImage& img : images) {
    img.image_path = relative_to(resolve_image_path(from_dir, img.image_path), to_dir);
  }
}

SplitFractions fractions_from(const Options& o) {
  SplitFractions f;
  if (!o.has("fractions")) return f;
  const json& j = o.raw("fractions");
  try {
    if (j.is_array()) {
      if (j.size() != 3) fail(ErrorCode::kBadFractions, "fractions need three values");
      f = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } else {
      f.train = j.value("train", f.train);
      f.validation = j.value("validation", j.value("val", f.validation));
      f.test = j.value("test", f.test);
    }
  } catch (const json::exception&) {
    fail(ErrorCode::kBadFractions, "fractions must be numbers");
  }
  return f;
}

ordered_json split_counts(const DatasetSplit& s) {
  return {{"train", s.train.size()}, {"validation", s.validation.size()}, {"test", s.test.size()}};
}

std::vector<std::string> ids_of(const std::vector<AnnotatedImage>& images) {
  std::vector<std::string> ids;
  for (const AnnotatedImage& i : images) ids.push_back(i.image_id);
  return ids;
}

// ---------------------------------------------------------------------------

fs::path find_sibling_image(const fs::path& doc) {
  for (const char* ext : {".jpg", ".jpeg", ".png", ".JPG", ".JPEG", ".PNG"}) {
    fs::path candidate = doc;
    candidate.replace_extension(ext);
    if (fs::is_regular_file(candidate)) return candidate;
  }
  return {};
}

std::string cmd_convert(const Options& o) {
  const fs::path in_dir = o.path("input_dir");
  const fs::path out_dir = o.path("output_dir");
  const bool skip_invalid = o.get<bool>("skip_invalid", false);
  if (!fs::is_directory(in_dir)) fail(ErrorCode::kIoFailure, in_dir.string() + " is not a directory");

  std::vector<fs::path> docs;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") docs.push_back(entry.path());
  }
  std::sort(docs.begin(), docs.end());

  std::vector<AnnotatedImage> images;
  ordered_json skipped = ordered_json::array();
  for (const fs::path& doc : docs) {
    try {
      const std::string text = detail::read_text(doc);
      fs::path image = find_sibling_image(doc);
      if (auto declared = labelme_image_path(text); declared && !declared->empty()) {
        image = in_dir / *declared;
      }
      std::optional<ImageDims> dims = labelme_declared_dims(text);
      if (!dims) {
        if (image.empty()) {
          fail(ErrorCode::kMalformedDocument, "no image size and no image file");
        }
        const Image img = load_image(image);
        dims = ImageDims{img.width(), img.height()};
      }
      const std::string path_text = image.empty() ? std::string() : relative_to(image, out_dir);
      images.push_back(parse_labelme(text, *dims, doc.stem().string(), path_text));
    } catch (const Error& e) {
      if (!skip_invalid || is_environment_error(e.code())) {
        throw Error(e.code(), doc.filename().string() + ": " + e.what());
      }
      skipped.push_back({{"file", doc.filename().string()},
                         {"error", to_string(e.code())},
                         {"message", e.what()}});
    }
  }
  const std::vector<std::string> ids = ids_of(images);
  const DatasetSplit split = make_split(ids, fractions_from(o), o.seed());
  const fs::path manifest = export_dataset(images, split, out_dir);

  ordered_json r;
  r["manifest"] = manifest.string();
  r["images"] = images.size();
  r["split"] = split_counts(split);
  r["skipped"] = std::move(skipped);
  return dump(r);
}

std::string cmd_split(const Options& o) {
  const fs::path src = o.path("manifest");
  const fs::path out_dir = o.path("output_dir");
  Manifest m = load_manifest(src);
  rebase_paths(m.images, src.parent_path(), out_dir);
  const DatasetSplit split = make_split(ids_of(m.images), fractions_from(o), o.seed());
  const fs::path manifest = export_dataset(m.images, split, out_dir);
  ordered_json r;
  r["manifest"] = manifest.string();
  r["images"] = m.images.size();
  r["split"] = split_counts(split);
  return dump(r);
}

Rgb fill_from(const Options& o) {
  if (!o.has("fill")) return PreprocessOptions{}.fill;
  const json& j = o.raw("fill");
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "white") return {255, 255, 255};
    if (s == "black") return {0, 0, 0};
  } else if (j.is_array() && j.size() == 3 && std::all_of(j.begin(), j.end(), [](const json& v) {
               return v.is_number_integer() && v.get<int>() >= 0 && v.get<int>() <= 255;
             })) {
    return {static_cast<std::uint8_t>(j[0].get<int>()), static_cast<std::uint8_t>(j[1].get<int>()),
            static_cast<std::uint8_t>(j[2].get<int>())};
  }
  fail(ErrorCode::kInvalidArgument, "fill must be \"white\", \"black\" or [r, g, b]");
}

std::string cmd_preprocess(const Options& o) {
  const fs::path src = o.path("manifest");
  const fs::path out_dir = o.path("output_dir");
  const auto backend = make_foreground_backend(o.get<std::string>("backend", "color-threshold"));
  PreprocessOptions popts;
  popts.tau = o.get<double>("tau", popts.tau);
  popts.fill = fill_from(o);

  const Manifest m = load_manifest(src);
  std::vector<std::pair<std::string, PreprocessResult>> results;
  for (const AnnotatedImage& rec : m.images) {
    const Image img = load_image(resolve_image_path(src.parent_path(), rec.image_path));
    results.emplace_back(rec.image_id, preprocess(img, *backend, popts));
  }
  DestroyedPartition parts = filter_destroyed(std::move(results));

  std::vector<AnnotatedImage> kept;
  DatasetSplit split;
  for (auto& [id, res] : parts.kept) {
    const auto it = std::find_if(m.images.begin(), m.images.end(),
                                 [&id = id](const AnnotatedImage& a) { return a.image_id == id; });
    AnnotatedImage rec = *it;
    const std::string stem = safe_file_stem(id);
    save_image(out_dir / "images" / (stem + ".png"), res.cleaned_image);
    save_mask_png(out_dir / "masks" / (stem + ".png"), res.foreground_mask);
    rec.image_path = "images/" + stem + ".png";
    const std::string_view member = m.split.membership(id);
    if (member == "train") split.train.insert(id);
    if (member == "validation") split.validation.insert(id);
    if (member == "test") split.test.insert(id);
    kept.push_back(std::move(rec));
  }
  const fs::path manifest = export_dataset(kept, split, out_dir);

  ordered_json report;
  report["backend"] = backend->name();
  report["tau"] = popts.tau;
  report["kept"] = parts.kept.size();
  ordered_json discarded = ordered_json::array();
  for (const auto& [id, res] : parts.discarded) {
    discarded.push_back({{"id", id}, {"foreground_fraction", res.foreground_fraction}});
  }
  report["discarded"] = std::move(discarded);
  detail::write_text(out_dir / "preprocess_report.json", dump(report));
  report["manifest"] = manifest.string();
  return dump(report);
}

// ---------------------------------------------------------------------------

AugmentOp parse_op(const json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
    fail(ErrorCode::kInvalidArgument, "each augmentation op needs an \"op\" name");
  }
  const std::string name = j["op"].get<std::string>();
  AugmentOp op;
  try {
    if (name == "rotate") {
      op = Rotate{j.value("degrees", 45.0), j.value("expand_canvas", true)};
    } else if (name == "flip_horizontal" || name == "flip") {
      op = FlipHorizontal{};
    } else if (name == "blur") {
      op = Blur{j.value("radius", 1.0)};
    } else if (name == "noise") {
      op = AddNoise{j.value("sigma", 8.0), j.value("seed", std::uint64_t{0})};
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown augmentation op \"" + name + "\"");
    }
  } catch (const json::exception&) {
    fail(ErrorCode::kInvalidArgument, "bad parameters for augmentation op \"" + name + "\"");
  }
  validate(op);
  return op;
}

std::vector<std::vector<AugmentOp>> parse_plans(const json& plan) {
  std::vector<std::vector<AugmentOp>> plans;
  auto chain = [](const json& ops) {
    if (!ops.is_array()) fail(ErrorCode::kInvalidArgument, "an augmentation chain must be an array");
    std::vector<AugmentOp> out;
    for (const json& op : ops) out.push_back(parse_op(op));
    return out;
  };
  if (plan.is_object() && plan.contains("plans")) {
    for (const json& ops : plan["plans"]) plans.push_back(chain(ops));
  } else if (plan.is_object() && plan.contains("ops")) {
    plans.push_back(chain(plan["ops"]));
  } else if (plan.is_array()) {
    plans.push_back(chain(plan));
  } else {
    fail(ErrorCode::kInvalidArgument, "augmentation plan needs \"ops\" or \"plans\"");
  }
  if (plans.empty()) fail(ErrorCode::kInvalidArgument, "augmentation plan is empty");
  return plans;
}

std::string cmd_augment(const Options& o) {
  const fs::path src = o.path("manifest");
  const fs::path out_dir = o.path("output_dir");
  const json plan = o.has("plan") && o.raw("plan").is_string()
                        ? detail::read_json(o.path("plan"), ErrorCode::kInvalidArgument)
                        : o.get<json>("plan");
  const auto plans = parse_plans(plan);
  std::vector<std::string> splits = o.get<std::vector<std::string>>("splits", {"train"});
  for (std::string& s : splits) {
    if (s == "val") s = "validation";
  }

  Manifest m = load_manifest(src);
  std::vector<AnnotatedImage> images = m.images;
  rebase_paths(images, src.parent_path(), out_dir);
  DatasetSplit split = m.split;
  std::size_t created = 0;
  for (std::size_t i = 0; i < m.images.size(); ++i) {
    const AnnotatedImage& rec = m.images[i];
    const std::string member(m.split.membership(rec.image_id));
    if (std::find(splits.begin(), splits.end(), member) == splits.end()) continue;
    const Image img = load_image(resolve_image_path(src.parent_path(), rec.image_path));
    for (std::size_t k = 0; k < plans.size(); ++k) {
      std::vector<AugmentOp> ops = plans[k];
      for (AugmentOp& op : ops) {
        if (auto* noise = std::get_if<AddNoise>(&op)) {
          noise->seed += o.seed() * 1000003u + i * plans.size() + k;
        }
      }
      Sample out = augment_sample(ops, Sample{rec, img});
      const std::string id = rec.image_id + "_aug" + std::to_string(k + 1);
      const std::string file = "images/" + safe_file_stem(id) + ".png";
      save_image(out_dir / file, out.image);
      out.annotations.image_id = id;
      out.annotations.image_path = file;
      if (member == "train") split.train.insert(id);
      if (member == "validation") split.validation.insert(id);
      if (member == "test") split.test.insert(id);
      images.push_back(std::move(out.annotations));
      ++created;
    }
  }
  const fs::path manifest = export_dataset(images, split, out_dir);
  ordered_json r;
  r["manifest"] = manifest.string();
  r["original"] = m.images.size();
  r["augmented"] = created;
  r["images"] = images.size();
  return dump(r);
}

// ---------------------------------------------------------------------------

std::string training_overrides(const Options& o) {
  json t = o.has("training") ? o.raw("training") : json::object();
  if (!t.is_object()) fail(ErrorCode::kInvalidArgument, "option \"training\" must be an object");
  if (o.has("seed")) t["seed"] = o.seed();
  return t.dump();
}

std::vector<LabeledImage> load_labeled_dataset(const fs::path& path,
                                               std::optional<ClassifierMode>* mode) {
  std::vector<LabeledImage> data;
  auto label_of = [](const std::string& text) {
    const auto l = parse_image_class_label(text);
    if (!l) fail(ErrorCode::kUnknownLabel, "unknown image class \"" + text + "\"");
    return *l;
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& d : dirs) {
      const ImageClassLabel label = label_of(d.filename().string());
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(d)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) data.push_back({load_image(f), label});
    }
    return data;
  }
  const json j = detail::read_json(path, ErrorCode::kMalformedDocument);
  try {
    if (j.contains("mode")) *mode = mode_from_class_count(j["mode"].get<int>());
    for (const json& item : j.at("images")) {
      const fs::path img = resolve_image_path(path.parent_path(), item.at("path").get<std::string>());
      data.push_back({load_image(img), label_of(item.at("label").get<std::string>())});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedDocument, path.string() + ": " + e.what());
  }
  return data;
}

std::string cmd_train_classifier(const Options& o) {
  const fs::path out_dir = o.path("output_dir");
  std::optional<ClassifierMode> mode;
  if (o.has("mode")) mode = mode_from_class_count(o.get<int>("mode"));
  std::optional<ClassifierMode> declared;
  const auto data = load_labeled_dataset(o.path("dataset"), &declared);
  if (!mode) mode = declared;
  ClassifierConfig cfg = parse_classifier_config(training_overrides(o));
  if (mode) cfg.num_classes = static_cast<int>(*mode);

  const TrainedClassifier trained = train_classifier(data, cfg);
  trained.model->save(out_dir);
  detail::write_text(out_dir / "training_log.jsonl", to_jsonl(trained.log));
  ordered_json r;
  r["model"] = out_dir.string();
  r["images"] = data.size();
  r["epochs"] = trained.log.size();
  if (!trained.log.empty()) {
    r["final_loss"] = trained.log.back().loss;
    r["final_accuracy"] = trained.log.back().metric;
  }
  return dump(r);
}

std::vector<const AnnotatedImage*> select_split(const Manifest& m, const std::string& split) {
  if (split == "all") {
    std::vector<const AnnotatedImage*> out;
    for (const AnnotatedImage& a : m.images) out.push_back(&a);
    return out;
  }
  return m.in_split(split == "val" ? "validation" : split);
}

std::string cmd_train_segmenter(const Options& o) {
  const fs::path src = o.path("manifest");
  const fs::path out_dir = o.path("output_dir");
  const Manifest m = load_manifest(src);
  std::vector<SegmentationSample> data;
  for (const AnnotatedImage* rec : select_split(m, o.get<std::string>("split", "train"))) {
    data.push_back({load_image(resolve_image_path(src.parent_path(), rec->image_path)), *rec});
  }
  const SegmenterConfig cfg = parse_segmenter_config(training_overrides(o));
  const TrainedSegmenter trained = train_segmenter(data, cfg);
  trained.model->save(out_dir);
  detail::write_text(out_dir / "training_log.jsonl", to_jsonl(trained.log));
  ordered_json r;
  r["model"] = out_dir.string();
  r["images"] = data.size();
  r["epochs"] = trained.log.size();
  if (!trained.log.empty()) {
    r["final_loss"] = trained.log.back().loss;
    r["final_pixel_accuracy"] = trained.log.back().metric;
  }
  return dump(r);
}

// ---------------------------------------------------------------------------

void write_report(const Options& o, const std::string& text, const std::string& json_text,
                  const std::string& stem) {
  if (!o.has("output_dir")) return;
  const fs::path dir = o.path("output_dir");
  detail::write_text(dir / (stem + ".txt"), text);
  detail::write_text(dir / (stem + ".json"), json_text);
}

std::string cmd_classify_eval(const Options& o) {
  std::vector<LabelPair> pairs;
  std::optional<ClassifierMode> mode;
  if (o.has("mode")) mode = mode_from_class_count(o.get<int>("mode"));
  auto label_of = [](const std::string& text) {
    const auto l = parse_image_class_label(text);
    if (!l) fail(ErrorCode::kUnknownLabel, "unknown image class \"" + text + "\"");
    return *l;
  };
  if (o.has("pairs")) {
    const json j = detail::read_json(o.path("pairs"), ErrorCode::kMalformedDocument);
    try {
      for (const json& p : j.at("pairs")) {
        pairs.push_back({label_of(p.at("true").get<std::string>()),
                         label_of(p.at("predicted").get<std::string>())});
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kMalformedDocument, std::string("pairs file: ") + e.what());
    }
  } else {
    const auto classifier = make_classifier(o.get<std::string>("classifier"));
    if (!mode) mode = classifier->mode();
    std::optional<ClassifierMode> declared;
    for (const LabeledImage& item : load_labeled_dataset(o.path("dataset"), &declared)) {
      pairs.push_back({item.label, classifier->classify(item.image).label});
    }
  }
  if (!mode) {
    const bool accessories = std::any_of(pairs.begin(), pairs.end(), [](const LabelPair& p) {
      return p.truth == ImageClassLabel::Accessories || p.predicted == ImageClassLabel::Accessories;
    });
    mode = accessories ? ClassifierMode::FiveClass : ClassifierMode::FourClass;
  }
  const ClassificationReport report = classification_report(pairs, *mode);
  const std::string text = render_classification_report(report, o.get<std::string>("title", ""));
  const std::string js = to_json(report);
  write_report(o, text, js, "classification_report");
  ordered_json r = ordered_json::parse(js);
  r["text"] = text;
  return dump(r);
}

std::vector<double> thresholds_from(const Options& o) {
  if (!o.has("thresholds")) return kDefaultIouThresholds;
  const json& j = o.raw("thresholds");
  std::vector<double> out;
  try {
    if (j.is_string()) {
      std::stringstream ss(j.get<std::string>());
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      }
    } else {
      out = j.get<std::vector<double>>();
    }
  } catch (const std::exception&) {
    fail(ErrorCode::kBadThreshold, "thresholds must be a list of numbers");
  }
  if (out.empty()) fail(ErrorCode::kBadThreshold, "no IoU thresholds given");
  return out;
}

std::string cmd_segment_eval(const Options& o) {
  const fs::path src = o.path("manifest");
  const Manifest m = load_manifest(src);
  const auto kind = parse_iou_kind(o.get<std::string>("iou_kind", "mask"));
  if (!kind) fail(ErrorCode::kInvalidArgument, "iou_kind must be mask or box");
  const std::vector<double> thresholds = thresholds_from(o);
  const auto selected = select_split(m, o.get<std::string>("split", "test"));

  std::vector<GroundTruth> gts;
  for (const AnnotatedImage* rec : selected) {
    for (const PolygonAnnotation& poly : rec->annotations) {
      gts.push_back(GroundTruth::from_mask(rec->image_id, poly.label,
                                           rasterize(poly, rec->width, rec->height)));
    }
  }

  std::vector<ScoredDetection> dets;
  if (o.has("detections")) {
    const fs::path det_path = o.path("detections");
    const json j = detail::read_json(det_path, ErrorCode::kMalformedDocument);
    try {
      for (const json& entry : j.at("images")) {
        const std::string id = entry.at("id").get<std::string>();
        const auto rec = std::find_if(selected.begin(), selected.end(),
                                      [&id](const AnnotatedImage* a) { return a->image_id == id; });
        if (rec == selected.end()) continue;
        for (const json& d : entry.at("detections")) {
          const auto cls = parse_garment_class(d.at("class").get<std::string>());
          if (!cls) fail(ErrorCode::kUnknownLabel, "unknown garment class in detections");
          BinaryMask mask;
          if (d.contains("mask_png") && d["mask_png"].is_string()) {
            mask = load_mask_png(resolve_image_path(det_path.parent_path(), d["mask_png"].get<std::string>()));
          } else {
            const auto b = d.at("bbox").get<std::vector<int>>();
            if (b.size() != 4) fail(ErrorCode::kMalformedDocument, "bbox needs four values");
            mask = filled_box({b[0], b[1], b[2], b[3]}, (*rec)->width, (*rec)->height);
          }
          if (mask.width() != (*rec)->width || mask.height() != (*rec)->height) {
            fail(ErrorCode::kDimensionMismatch, "detection mask size differs from image " + id);
          }
          dets.push_back({id, make_detection(std::move(mask), *cls, d.at("score").get<double>())});
        }
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kMalformedDocument, det_path.string() + ": " + e.what());
    }
  } else {
    const auto segmenter = make_segmenter(o.get<std::string>("segmenter"));
    for (const AnnotatedImage* rec : selected) {
      const Image img = load_image(resolve_image_path(src.parent_path(), rec->image_path));
      for (Detection& d : segmenter->detect(img)) dets.push_back({rec->image_id, std::move(d)});
    }
  }

  const APResult result = map_over_thresholds(gts, dets, thresholds, *kind);
  const MapTableRow row{o.get<std::string>("name", "model"), result.map};
  const std::string text =
      render_map_table(thresholds, std::span<const MapTableRow>(&row, 1),
                       o.get<std::string>("title", "mAP comparison"));
  const std::string js = to_json(result);
  write_report(o, text, js, "map_report");
  ordered_json r = ordered_json::parse(js);
  r["images"] = selected.size();
  r["ground_truths"] = gts.size();
  r["detections"] = dets.size();
  r["text"] = text;
  return dump(r);
}

// ---------------------------------------------------------------------------

std::string cmd_run(const Options& o) {
  const fs::path input = o.path("input");
  const fs::path out_dir = o.path("output_dir");
  Backends backends;
  backends.classifier = make_classifier(o.get<std::string>("classifier"));
  backends.segmenter = make_segmenter(o.get<std::string>("segmenter"));
  backends.foreground = make_foreground_backend(o.get<std::string>("foreground", "color-threshold"));
  PipelineConfig cfg;
  cfg.preprocess.tau = o.get<double>("tau", cfg.preprocess.tau);
  cfg.preprocess.fill = fill_from(o);
  cfg.score_floor = o.get<double>("score_floor", cfg.score_floor);
  if (!(cfg.score_floor >= 0.0 && cfg.score_floor <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "score_floor must lie in [0, 1]");
  }
  cfg.classify_on_cleaned = !o.get<bool>("classify_raw", false);
  cfg.workers = o.get<int>("workers", 1);
  if (cfg.workers < 1) fail(ErrorCode::kInvalidArgument, "workers must be at least 1");
  const bool overlay = o.get<bool>("overlay", false);
  OverlayOptions overlay_opts;
  overlay_opts.alpha = o.get<double>("overlay_alpha", overlay_opts.alpha);

  if (input.extension() == ".json") {
    const Manifest m = load_manifest(input);
    const BatchSummary summary =
        run_batch(m, input.parent_path(), backends, cfg, out_dir, overlay ? &overlay_opts : nullptr);
    return to_json(summary);
  }

  const Image img = load_image(input);
  const std::string id = o.get<std::string>("image_id", input.stem().string());
  const PipelineOutput out = run_pipeline(img, id, backends, cfg);
  const std::string stem = safe_file_stem(id);
  std::vector<std::string> masks;
  for (const Detection& d : out.garments) {
    masks.push_back(stem + "_" + std::string(to_string(d.cls)) + ".png");
    save_mask_png(out_dir / masks.back(), d.mask);
  }
  const std::string js = to_json(out, masks);
  detail::write_text(out_dir / (stem + ".json"), js);
  if (overlay) save_image(out_dir / (stem + "_overlay.png"), render_overlay(img, out, overlay_opts));
  return js;
}

}  // namespace

std::span<const std::string_view> command_names() { return kCommands; }

std::string run_command(std::string_view name, std::string_view options_json) {
  static const std::array<std::pair<std::string_view, std::function<std::string(const Options&)>>, 9>
      table = {{{"convert", cmd_convert},
                {"split", cmd_split},
                {"preprocess", cmd_preprocess},
                {"augment", cmd_augment},
                {"train-classifier", cmd_train_classifier},
                {"train-segmenter", cmd_train_segmenter},
                {"classify-eval", cmd_classify_eval},
                {"segment-eval", cmd_segment_eval},
                {"run", cmd_run}}};
  const auto it = std::find_if(table.begin(), table.end(),
                               [name](const auto& e) { return e.first == name; });
  if (it == table.end()) fail(ErrorCode::kInvalidArgument, "unknown task \"" + std::string(name) + "\"");
  const Options opts(merged_options(name, options_json));
  try {
    return it->second(opts);
  } catch (const fs::filesystem_error& e) {
    fail(ErrorCode::kIoFailure, e.what());
  }
}

}  // namespace garmentseg
