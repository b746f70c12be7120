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
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "garmentseg/commands.hpp"
#include "test_support.hpp"

using namespace garmentseg;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json run(std::string_view name, const json& options) {
  return json::parse(run_command(name, options.dump()));
}

void write_json(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << j.dump(2);
}

// LabelMe folder of n synthetic two-garment images.
void write_labelme_folder(const fs::path& dir, int n, std::uint64_t seed) {
  testing::Gen g(seed);
  for (int i = 0; i < n; ++i) {
    const std::string id = "look" + std::to_string(i);
    const auto s = testing::two_rectangle_image(g, id);
    save_image(dir / (id + ".png"), s.image);
    json shapes = json::array();
    for (const auto& poly : s.annotations.annotations) {
      json pts = json::array();
      for (const Point& p : poly.vertices) pts.push_back({p.x, p.y});
      shapes.push_back({{"label", poly.label == GarmentClass::Top ? "Top" : "bottoms"},
                        {"points", pts},
                        {"shape_type", "polygon"}});
    }
    write_json(dir / (id + ".json"), {{"version", "5.0.1"},
                                      {"shapes", shapes},
                                      {"imagePath", id + ".png"},
                                      {"imageWidth", s.image.width()},
                                      {"imageHeight", s.image.height()}});
  }
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("command table") {
  const auto names = command_names();
  CHECK(names.size() == 9);
  CHECK(std::find(names.begin(), names.end(), "segment-eval") != names.end());
  CHECK(testing::error_code_of([] { run_command("train", "{}"); }) == ErrorCode::kInvalidArgument);
  CHECK(testing::error_code_of([] { run_command("split", "not json"); }) == ErrorCode::kInvalidArgument);
  CHECK(testing::error_code_of([] { run_command("split", "{}"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("end-to-end workflow") {
  const fs::path root = testing::scratch_dir("workflow");
  write_labelme_folder(root / "labelme", 30, 5);

  const json conv = run("convert", {{"input_dir", (root / "labelme").string()},
                                    {"output_dir", (root / "dataset").string()},
                                    {"fractions", {{"train", 0.6}, {"validation", 0.1}, {"test", 0.3}}},
                                    {"seed", 3}});
  CHECK(conv.at("images") == 30);
  CHECK(conv.at("split").at("train") == 18);
  CHECK(conv.at("split").at("test") == 9);
  const fs::path manifest = root / "dataset" / "manifest.json";
  REQUIRE(fs::exists(manifest));
  CHECK(load_manifest(manifest).images.front().annotations.size() == 2);

  // A config file supplies defaults; explicit options win.
  write_json(root / "config.json", {{"seed", 99}, {"split", {{"fractions", {0.5, 0.25, 0.25}}}}});
  const json resplit = run("split", {{"config", (root / "config.json").string()},
                                     {"manifest", manifest.string()},
                                     {"output_dir", (root / "resplit").string()},
                                     {"seed", 3}});
  CHECK(resplit.at("split").at("validation") == 7);
  const Manifest rs = load_manifest(root / "resplit" / "manifest.json");
  CHECK(fs::exists(resolve_image_path(root / "resplit", rs.images.front().image_path)));

  const json pre = run("preprocess", {{"manifest", manifest.string()},
                                      {"output_dir", (root / "clean").string()},
                                      {"backend", "mock:all-ones"}});
  CHECK(pre.at("kept") == 30);
  CHECK(fs::exists(root / "clean" / "preprocess_report.json"));
  CHECK(fs::exists(root / "clean" / "masks" / "look0.png"));

  const json aug = run("augment", {{"manifest", manifest.string()},
                                   {"output_dir", (root / "aug").string()},
                                   {"plan", {{"plans", {{{{"op", "flip"}}},
                                                        {{{"op", "rotate"}, {"degrees", 45}}}}}}},
                                   {"seed", 1}});
  CHECK(aug.at("augmented") == 36);
  CHECK(aug.at("images") == 66);
  const Manifest am = load_manifest(root / "aug" / "manifest.json");
  CHECK(am.split.train.size() == 18 * 3);
  CHECK(am.split.train.count("look0_aug1") + am.split.train.count("look1_aug1") +
            am.split.train.count("look2_aug1") >= 1);

  const json seg = run("train-segmenter", {{"manifest", manifest.string()},
                                           {"output_dir", (root / "seg").string()},
                                           {"training", {{"epochs_heads", 2}, {"epochs_all", 6}}},
                                           {"seed", 4}});
  CHECK(seg.at("epochs") == 8);
  CHECK(fs::exists(root / "seg" / "model.json"));
  CHECK(fs::exists(root / "seg" / "training_log.jsonl"));

  const json ev = run("segment-eval", {{"manifest", manifest.string()},
                                       {"segmenter", (root / "seg").string()},
                                       {"output_dir", (root / "eval").string()},
                                       {"thresholds", "0.5,0.75"},
                                       {"name", "native"}});
  CHECK(ev.at("images") == 9);
  CHECK(ev.at("ground_truths") == 18);
  CHECK(ev.at("per_threshold")[0].at("mAP").get<double>() >= 0.8);
  CHECK(ev.at("text").get<std::string>().find("native") != std::string::npos);
  CHECK(fs::exists(root / "eval" / "map_report.txt"));

  // Batch run, then score the written detections file with box IoU.
  const json batch = run("run", {{"input", manifest.string()},
                                 {"output_dir", (root / "out").string()},
                                 {"classifier", "mock:fixed:FullBody@0.9"},
                                 {"segmenter", (root / "seg").string()},
                                 {"workers", 2},
                                 {"overlay", true}});
  CHECK(batch.at("processed") == 30);
  CHECK(batch.at("route_counts").at("FullBody") == 30);
  CHECK(fs::exists(root / "out" / "look0_overlay.png"));
  const json from_file = run("segment-eval", {{"manifest", manifest.string()},
                                              {"detections", (root / "out" / "detections.json").string()},
                                              {"iou_kind", "box"}});
  CHECK(from_file.at("iou_kind") == "box");
  CHECK(from_file.at("per_threshold")[0].at("mAP").get<double>() >= 0.8);

  // Single image.
  const json single = run("run", {{"input", (root / "labelme" / "look3.png").string()},
                                  {"output_dir", (root / "single").string()},
                                  {"classifier", "mock:fixed:Top@0.7"},
                                  {"segmenter", "mock:none"}});
  CHECK(single.at("route") == "Top");
  REQUIRE(single.at("garments").size() == 1);
  CHECK(single.at("garments")[0].at("mask_png") == "look3_top.png");
  CHECK(fs::exists(root / "single" / "look3_top.png"));
}

TEST_CASE("classifier training and evaluation commands") {
  const fs::path root = testing::scratch_dir("classify_cmd");
  testing::Gen g(8);
  for (ImageClassLabel label : kAllImageClassLabels) {
    for (int i = 0; i < 6; ++i) {
      save_image(root / "data" / std::string(to_string(label)) / ("x" + std::to_string(i) + ".png"),
                 testing::class_colored_image(g, label));
    }
  }
  const json tr = run("train-classifier", {{"dataset", (root / "data").string()},
                                           {"output_dir", (root / "clf").string()},
                                           {"training", {{"epochs", 20}}}});
  CHECK(tr.at("images") == 30);
  CHECK(tr.at("final_accuracy").get<double>() >= 0.95);

  const json ev = run("classify-eval", {{"dataset", (root / "data").string()},
                                        {"classifier", (root / "clf").string()},
                                        {"output_dir", (root / "report").string()}});
  CHECK(ev.at("accuracy").get<double>() >= 0.95);
  CHECK(ev.at("text").get<std::string>().rfind("Image classifier [5 classes]", 0) == 0);
  CHECK(fs::exists(root / "report" / "classification_report.txt"));

  write_json(root / "pairs.json", {{"pairs", {{{"true", "Top"}, {"predicted", "Top"}},
                                              {{"true", "Top"}, {"predicted", "Bottom"}},
                                              {{"true", "Bottom"}, {"predicted", "Bottom"}},
                                              {{"true", "Bottom"}, {"predicted", "Bottom"}}}}});
  const json pairs = run("classify-eval", {{"pairs", (root / "pairs.json").string()}});
  CHECK(pairs.at("accuracy") == 0.75);
  CHECK(pairs.at("mode") == 4);
}

TEST_CASE("command errors carry data and environment codes") {
  const fs::path root = testing::scratch_dir("cmd_errors");
  CHECK(testing::error_code_of([&] {
          run("convert", {{"input_dir", (root / "nope").string()}, {"output_dir", root.string()}});
        }) == ErrorCode::kIoFailure);
  write_json(root / "in" / "bad.json", {{"shapes", {{{"label", "hat"}, {"points", {{0, 0}, {1, 0}, {1, 1}}}}}},
                                        {"imageWidth", 4},
                                        {"imageHeight", 4}});
  CHECK(testing::error_code_of([&] {
          run("convert", {{"input_dir", (root / "in").string()}, {"output_dir", (root / "o").string()}});
        }) == ErrorCode::kUnknownLabel);
  write_json(root / "in" / "good.json", {{"shapes", {{{"label", "top"}, {"points", {{0, 0}, {3, 0}, {3, 3}}}}}},
                                         {"imageWidth", 4},
                                         {"imageHeight", 4}});
  const json skipped = run("convert", {{"input_dir", (root / "in").string()},
                                       {"output_dir", (root / "o").string()},
                                       {"skip_invalid", true}});
  CHECK(skipped.at("images") == 1);
  CHECK(skipped.at("skipped").size() == 1);
  CHECK(testing::error_code_of([&] {
          run("run", {{"input", (root / "missing.png").string()},
                      {"output_dir", root.string()},
                      {"classifier", "mock:fixed:Top@0.9"},
                      {"segmenter", "mock:none"}});
        }) == ErrorCode::kDecodeFailure);
  CHECK(testing::error_code_of([&] {
          run("run", {{"input", (root / "missing.png").string()},
                      {"output_dir", root.string()},
                      {"classifier", "resnet-service"},
                      {"segmenter", "mock:none"}});
        }) == ErrorCode::kBackendUnavailable);
  CHECK(testing::error_code_of([&] {
          run("segment-eval", {{"manifest", (root / "o" / "manifest.json").string()},
                               {"segmenter", "mock:none"},
                               {"thresholds", "0.5,1.2"}});
        }) == ErrorCode::kBadThreshold);
}

}  // TEST_SUITE
