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

// garmentseg command-line front end. Every subcommand forwards its flags as
// a JSON options object to gs_run_task.

#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "garmentseg/garmentseg.h"

namespace {

using json = nlohmann::json;

// Flag values collected per subcommand; only flags that were given are
// forwarded, so --config can supply the rest.
struct Flags {
  std::map<std::string, std::string> text;
  std::map<std::string, double> number;
  std::map<std::string, std::int64_t> integer;
  std::map<std::string, bool> toggles;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

class Command {
 public:
  Command(CLI::App& app, std::string name, std::string description)
      : name_(std::move(name)), sub_(app.add_subcommand(name_, description)) {}

  CLI::App* app() { return sub_; }
  const std::string& name() const { return name_; }

  Command& text(const std::string& flag, const std::string& key, const std::string& help) {
    sub_->add_option(flag, flags_.text[key], help);
    keys_text_.push_back({flag, key});
    return *this;
  }
  Command& number(const std::string& flag, const std::string& key, const std::string& help) {
    sub_->add_option(flag, flags_.number[key], help);
    keys_number_.push_back({flag, key});
    return *this;
  }
  Command& integer(const std::string& flag, const std::string& key, const std::string& help) {
    sub_->add_option(flag, flags_.integer[key], help);
    keys_integer_.push_back({flag, key});
    return *this;
  }
  Command& toggle(const std::string& flag, const std::string& key, const std::string& help) {
    sub_->add_flag(flag, flags_.toggles[key], help);
    keys_toggle_.push_back({flag, key});
    return *this;
  }

  json options() const {
    json o = json::object();
    auto given = [this](const std::string& flag) {
      return sub_->get_option(first_name(flag))->count() > 0;
    };
    for (const auto& [flag, key] : keys_text_) {
      if (given(flag)) o[key] = flags_.text.at(key);
    }
    for (const auto& [flag, key] : keys_number_) {
      if (given(flag)) o[key] = flags_.number.at(key);
    }
    for (const auto& [flag, key] : keys_integer_) {
      if (given(flag)) o[key] = flags_.integer.at(key);
    }
    for (const auto& [flag, key] : keys_toggle_) {
      if (given(flag)) o[key] = flags_.toggles.at(key);
    }
    return o;
  }

 private:
  static std::string first_name(const std::string& flag) {
    const auto comma = flag.find(',');
    return comma == std::string::npos ? flag : flag.substr(0, comma);
  }

  std::string name_;
  CLI::App* sub_;
  Flags flags_;
  std::vector<std::pair<std::string, std::string>> keys_text_;
  std::vector<std::pair<std::string, std::string>> keys_number_;
  std::vector<std::pair<std::string, std::string>> keys_integer_;
  std::vector<std::pair<std::string, std::string>> keys_toggle_;
};

// Moves "training.<field>" keys into a nested object.
void nest_training(json& o) {
  json training = json::object();
  for (auto it = o.begin(); it != o.end();) {
    const std::string key = it.key();
    if (key.rfind("training.", 0) == 0) {
      training[key.substr(9)] = it.value();
      it = o.erase(it);
    } else {
      ++it;
    }
  }
  if (!training.empty()) o["training"] = training;
}

// Converts comma-separated list flags into JSON arrays.
void split_lists(json& o) {
  if (o.contains("fractions")) o["fractions"] = parse_list(o["fractions"].get<std::string>());
  if (o.contains("thresholds")) o["thresholds"] = parse_list(o["thresholds"].get<std::string>());
  if (o.contains("splits")) {
    std::vector<std::string> parts;
    std::stringstream ss(o["splits"].get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    o["splits"] = parts;
  }
  if (o.contains("fill")) {
    const std::string f = o["fill"].get<std::string>();
    if (f != "white" && f != "black") {
      json rgb = json::array();
      for (double v : parse_list(f)) rgb.push_back(static_cast<int>(v));
      o["fill"] = rgb;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Garment detection and segmentation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", gs_version());

  std::string config;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON file with default options")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for every randomised step");
  bool raw_json = false;
  app.add_flag("--json", raw_json, "Print the full JSON result for evaluation commands");

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& help) -> Command& {
    commands.push_back(std::make_unique<Command>(app, name, help));
    return *commands.back();
  };

  add("convert", "Convert a directory of LabelMe documents into a dataset manifest")
      .text("input_dir", "input_dir", "Directory holding LabelMe .json files")
      .text("-o,--output-dir", "output_dir", "Directory for manifest.json")
      .text("--fractions", "fractions", "train,validation,test fractions")
      .toggle("--skip-invalid", "skip_invalid", "Skip documents that fail to parse");

  add("split", "Re-split a manifest into train/validation/test")
      .text("manifest", "manifest", "Input manifest")
      .text("-o,--output-dir", "output_dir", "Directory for the new manifest.json")
      .text("--fractions", "fractions", "train,validation,test fractions");

  add("preprocess", "Remove backgrounds and drop destroyed images")
      .text("manifest", "manifest", "Input manifest")
      .text("-o,--output-dir", "output_dir", "Output directory")
      .text("--backend", "backend", "Foreground backend (color-threshold[:d], mock:...)")
      .number("--tau", "tau", "Destroyed-image foreground fraction threshold")
      .text("--fill", "fill", "Background fill: white, black or r,g,b");

  add("augment", "Apply an augmentation plan to a manifest")
      .text("manifest", "manifest", "Input manifest")
      .text("-o,--output-dir", "output_dir", "Output directory")
      .text("--plan", "plan", "Augmentation plan file")
      .text("--splits", "splits", "Comma-separated splits to augment (default train)");

  add("train-classifier", "Train the routing image classifier")
      .text("dataset", "dataset", "Labelled dataset file or directory of class folders")
      .text("-o,--output-dir", "output_dir", "Model directory")
      .integer("--mode", "mode", "Number of classes (4 or 5)")
      .integer("--epochs", "training.epochs", "Training epochs")
      .number("--learning-rate", "training.learning_rate", "Adam learning rate")
      .integer("--batch-size", "training.batch_size", "Minibatch size")
      .text("--backbone", "training.backbone", "ResNet50, VGG16 or InceptionV3");

  add("train-segmenter", "Train the garment instance segmenter")
      .text("manifest", "manifest", "Annotated manifest")
      .text("-o,--output-dir", "output_dir", "Model directory")
      .text("--split", "split", "Split to train on (default train, or all)")
      .integer("--epochs-heads", "training.epochs_heads", "Heads-only epochs")
      .integer("--epochs-all", "training.epochs_all", "All-layer epochs")
      .number("--lr-heads", "training.lr_heads", "Heads-phase learning rate")
      .number("--lr-all", "training.lr_all", "All-layer learning rate")
      .text("--init-weights-path", "training.init_weights_path", "Model directory to start from");

  add("classify-eval", "Per-class precision/recall/F1 report")
      .text("--pairs", "pairs", "File of (true, predicted) label pairs")
      .text("--dataset", "dataset", "Labelled dataset to classify")
      .text("--classifier", "classifier", "Classifier spec or model directory")
      .integer("--mode", "mode", "Number of classes (4 or 5)")
      .text("--title", "title", "Report title")
      .text("-o,--output-dir", "output_dir", "Write report .txt and .json here");

  add("segment-eval", "mAP over IoU thresholds")
      .text("manifest", "manifest", "Ground-truth manifest")
      .text("--detections", "detections", "Detections file written by run")
      .text("--segmenter", "segmenter", "Segmenter spec or model directory")
      .text("--split", "split", "Split to evaluate (default test, or all)")
      .text("--iou-kind", "iou_kind", "mask or box")
      .text("--thresholds", "thresholds", "Comma-separated IoU thresholds")
      .text("--name", "name", "Row name in the table")
      .text("--title", "title", "Table title")
      .text("-o,--output-dir", "output_dir", "Write report .txt and .json here");

  add("run", "Classify, route and segment an image or a manifest")
      .text("input", "input", "Image file or manifest .json")
      .text("-o,--output-dir", "output_dir", "Output directory")
      .text("--classifier", "classifier", "Classifier spec or model directory")
      .text("--segmenter", "segmenter", "Segmenter spec or model directory")
      .text("--foreground", "foreground", "Foreground backend")
      .number("--tau", "tau", "Destroyed-image threshold")
      .number("--score-floor", "score_floor", "Minimum segmenter score")
      .toggle("--classify-raw", "classify_raw", "Classify the raw image instead of the cleaned one")
      .integer("--workers", "workers", "Parallel workers for manifests")
      .toggle("--overlay", "overlay", "Write overlay images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (const auto& cmd : commands) {
    if (!cmd->app()->parsed()) continue;
    json options = cmd->options();
    nest_training(options);
    try {
      split_lists(options);
    } catch (const std::exception&) {
      std::cerr << "error: InvalidArgument: malformed list option\n";
      return 1;
    }
    if (!config.empty()) options["config"] = config;
    if (app.count("--seed") > 0) options["seed"] = seed;

    char* result = nullptr;
    const gs_status status = gs_run_task(cmd->name().c_str(), options.dump().c_str(), &result);
    if (status != GS_OK) {
      std::cerr << "error: " << gs_status_name(status) << ": " << gs_last_error() << "\n";
      return gs_status_exit_code(status);
    }
    const std::string out(result);
    gs_string_free(result);
    const bool report = cmd->name() == "classify-eval" || cmd->name() == "segment-eval";
    if (report && !raw_json) {
      std::cout << json::parse(out).at("text").get<std::string>();
    } else {
      std::cout << out;
    }
    return 0;
  }
  return 1;
}
