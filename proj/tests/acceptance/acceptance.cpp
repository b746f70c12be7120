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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "garmentseg/augmentation.hpp"
#include "garmentseg/evaluation.hpp"
#include "garmentseg/geometry.hpp"
#include "garmentseg/models.hpp"
#include "garmentseg/pipeline.hpp"
#include "test_support.hpp"

using namespace garmentseg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kApTolerance = 1e-9;
constexpr double kApBudgetSeconds = 30.0;
constexpr double kAreaTolerance = 0.05;
constexpr double kRotationIou = 0.9;
constexpr double kRoundTripTolerance = 1e-6;
constexpr double kSegmenterMap50 = 0.8;
constexpr double kClassifierAccuracy = 0.95;
constexpr double kEndToEndBudgetSeconds = 15 * 60.0;

// Collects the first few failure messages of one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  void note(const std::string& s) { info_.push_back(s); }
  bool ok() const { return failures_ == 0; }
  int failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }
  const std::vector<std::string>& info() const { return info_; }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> info_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(GARMENTSEG_GOLDEN_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

GroundTruth box_gt(const std::string& id) {
  return GroundTruth::from_mask(id, GarmentClass::Top, filled_box({0, 0, 9, 9}, 40, 10));
}
ScoredDetection box_det(const std::string& id, int x0, double score) {
  return {id, make_detection(filled_box({x0, 0, x0 + 9, 9}, 40, 10), GarmentClass::Top, score)};
}

void ap_oracle(Criterion& c) {
  const auto start = Clock::now();
  testing::Gen g(500);
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_ap_instance(g, 5, 4, 6);
    for (double t : kDefaultIouThresholds) {
      for (IouKind kind : {IouKind::Mask, IouKind::Box}) {
        for (GarmentClass cls : {GarmentClass::Top, GarmentClass::Bottom}) {
          const auto got = average_precision(inst.gts, inst.dets, cls, t, kind);
          const auto want = testing::oracle_ap(inst.gts, inst.dets, cls, t, kind);
          c.expect(got.has_value() == want.has_value(), "definedness differs in trial " + std::to_string(trial));
          if (got && want) {
            c.expect(std::abs(*got - *want) <= kApTolerance,
                     "trial " + std::to_string(trial) + ": " + fmt(*got) + " vs " + fmt(*want));
            ++compared;
          }
        }
      }
    }
  }
  const double secs = seconds_since(start);
  c.expect(secs < kApBudgetSeconds, "took " + fmt(secs) + " s");
  c.note(std::to_string(compared) + " AP values, " + fmt(secs) + " s");
}

void worked_ap(Criterion& c) {
  const std::vector<GroundTruth> two{box_gt("a"), box_gt("b")};
  const std::vector<ScoredDetection> three{box_det("a", 0, 0.9), box_det("a", 20, 0.8),
                                           box_det("b", 0, 0.7)};
  const auto ap = average_precision(two, three, GarmentClass::Top, 0.5);
  const auto oracle = testing::oracle_ap(two, three, GarmentClass::Top, 0.5, IouKind::Mask);
  c.expect(ap.has_value() && std::abs(*ap - 5.0 / 6.0) < 1e-12, "AP = " + (ap ? fmt(*ap) : "undefined"));
  c.expect(oracle.has_value() && std::abs(*oracle - 5.0 / 6.0) < 1e-12, "oracle disagrees");

  testing::Gen g(200);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = testing::random_ap_instance(g, 5, 4, 6);
    const APResult r = map_over_thresholds(inst.gts, inst.dets, kDefaultIouThresholds);
    for (std::size_t i = 1; i < r.map.size(); ++i) {
      if (r.map[i] && r.map[i - 1]) {
        c.expect(*r.map[i] <= *r.map[i - 1] + 1e-12, "mAP rises in trial " + std::to_string(trial));
      }
    }
  }
}

void geometry(Criterion& c) {
  testing::Gen g(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = g.integer(1, 20);
    const int h = g.integer(1, 20);
    const BinaryMask a = testing::random_mask(g, w, h, g.real(0, 1));
    const BinaryMask b = testing::random_mask(g, w, h, g.real(0, 1));
    const double ab = mask_iou(a, b);
    c.expect(ab == mask_iou(b, a) && ab >= 0.0 && ab <= 1.0, "mask_iou symmetry/bounds");
  }
  for (int trial = 0; trial < 200; ++trial) {
    const BBox a = testing::random_box(g, 32, 32);
    const BBox b = testing::random_box(g, 32, 32);
    c.expect(box_iou(a, b) == mask_iou(filled_box(a, 32, 32), filled_box(b, 32, 32)),
             "box_iou != filled mask_iou");
  }
  double worst = 0.0;
  for (int checked = 0; checked < 100;) {
    const auto poly = testing::random_convex_polygon(g, 50, 50, g.real(6, 45), g.real(6, 45), 3, 12);
    const double area = testing::shoelace(poly);
    if (area < 100.0) continue;
    ++checked;
    const double rel = std::abs(static_cast<double>(rasterize(poly, 100, 100).count()) - area) / area;
    worst = std::max(worst, rel);
    c.expect(rel <= kAreaTolerance, "popcount off by " + fmt(rel * 100) + "%");
  }
  c.note("worst area error " + fmt(worst * 100) + "%");
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask m = testing::random_mask(g, g.integer(1, 24), g.integer(1, 24), g.real(0.1, 0.7));
    const BinaryMask once = largest_component(m);
    c.expect(largest_component(once) == once, "largest_component not idempotent");
    bool subset = true;
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) subset = subset && (!once.get(x, y) || m.get(x, y));
    c.expect(subset, "largest_component adds pixels");
  }
}

void augmentation(Criterion& c) {
  testing::Gen g(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto poly = testing::random_convex_polygon(g, 30, 25, 20, 15);
    const BinaryMask direct = apply_to_mask(FlipHorizontal{}, rasterize(poly, 60, 50));
    const auto moved = apply_to_polygon(FlipHorizontal{}, {GarmentClass::Top, poly}, {60, 50});
    const double iou = testing::count_iou(direct, rasterize(moved.vertices, 60, 50));
    c.expect(iou == 1.0, "flip IoU " + fmt(iou));
  }
  double worst = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ImageDims dims{80, 64};
    std::vector<Point> poly;
    do {
      poly = testing::random_convex_polygon(g, 40, 32, 22, 18, 4, 9);
    } while (std::abs(testing::shoelace(poly)) < 400.0);
    const Rotate op{trial == 0 ? 45.0 : g.real(-90, 90), true};
    const ImageDims out = output_dims(op, dims);
    const BinaryMask via_mask = apply_to_mask(op, rasterize(poly, dims.width, dims.height));
    const auto moved = apply_to_polygon(op, {GarmentClass::Top, poly}, dims);
    const double iou = testing::count_iou(via_mask, rasterize(moved.vertices, out.width, out.height));
    worst = std::min(worst, iou);
    c.expect(iou >= kRotationIou, "rotation IoU " + fmt(iou));
  }
  c.note("worst rotation IoU " + fmt(worst));
  for (int trial = 0; trial < 50; ++trial) {
    const ImageDims dims{g.integer(10, 200), g.integer(10, 200)};
    const auto poly = testing::random_convex_polygon(g, dims.width / 2.0, dims.height / 2.0,
                                                     dims.width / 3.0, dims.height / 3.0);
    const PolygonAnnotation p{GarmentClass::Top, poly};
    const auto back = apply_to_polygon(Rotate{-45.0, false}, apply_to_polygon(Rotate{45.0, false}, p, dims), dims);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      c.expect(std::abs(back.vertices[i].x - poly[i].x) < kRoundTripTolerance &&
                   std::abs(back.vertices[i].y - poly[i].y) < kRoundTripTolerance,
               "45/-45 round trip drift");
    }
  }
}

void routing(Criterion& c) {
  using L = ImageClassLabel;
  c.expect(route_action(L::Top) == RouteAction::Passthrough, "Top");
  c.expect(route_action(L::Bottom) == RouteAction::Passthrough, "Bottom");
  c.expect(route_action(L::FullBody) == RouteAction::Segment, "FullBody");
  c.expect(route_action(L::HalfBody) == RouteAction::Segment, "HalfBody");
  c.expect(route_action(L::Accessories) == RouteAction::Skip, "Accessories");

  const auto fg = std::make_shared<CenteredRectangleForeground>(0.5);
  const auto seg = make_segmenter("mock:halves");
  const Image img(40, 40, {120, 120, 120});
  for (L label : kAllImageClassLabels) {
    const std::string name(to_string(label));
    const PipelineOutput out =
        run_pipeline(img, "x", {std::make_shared<FixedClassifier>(label, 0.9), seg, fg}, {});
    c.expect(out.route == label, name + ": route");
    switch (route_action(label)) {
      case RouteAction::Segment:
        c.expect(out.garments.size() == 2 && !out.skipped, name + ": expected two garments");
        break;
      case RouteAction::Passthrough:
        c.expect(out.garments.size() == 1 && !out.skipped &&
                     (out.garments[0].cls == GarmentClass::Top) == (label == L::Top),
                 name + ": expected one passthrough garment");
        break;
      case RouteAction::Skip:
        c.expect(out.garments.empty() && out.skipped, name + ": expected skip");
        break;
    }
  }

  testing::Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MockDetection> dets;
    const int n = g.integer(0, 8);
    for (int i = 0; i < n; ++i) {
      const double x0 = g.real(0, 0.7), y0 = g.real(0, 0.7);
      dets.push_back({g.coin() ? GarmentClass::Top : GarmentClass::Bottom,
                      g.coin(0.3) ? 0.5 : g.real(0, 1),
                      {x0, y0, x0 + 0.3, y0 + 0.3}});
    }
    PipelineConfig cfg;
    cfg.score_floor = g.real(0.0, 1.0);
    const PipelineOutput out = run_pipeline(
        Image(30, 30), "adv",
        {std::make_shared<FixedClassifier>(L::HalfBody, 0.6), std::make_shared<FixedSegmenter>(dets), fg},
        cfg);
    for (GarmentClass cls : {GarmentClass::Top, GarmentClass::Bottom}) {
      double best = -1.0;
      for (const auto& d : dets) {
        if (d.cls == cls && d.score >= cfg.score_floor) best = std::max(best, d.score);
      }
      int count = 0;
      double got = -1.0;
      for (const auto& d : out.garments) {
        if (d.cls == cls) {
          ++count;
          got = d.score;
        }
      }
      c.expect(count <= 1, "duplicate class in output");
      c.expect(got == best, "wrong survivor in trial " + std::to_string(trial));
    }
  }
}

void configs(Criterion& c) {
  const ClassifierConfig k;
  c.expect(k.learning_rate == 1e-4, "classifier lr");
  c.expect(k.batch_size == 32, "batch size");
  c.expect(k.optimizer == Optimizer::Adam, "optimizer");
  c.expect(k.loss == Loss::CategoricalCrossEntropy, "loss");
  c.expect(k.epochs == 500, "epochs");
  const SegmenterConfig s;
  c.expect(s.lr_heads == 1e-3, "lr_heads");
  c.expect(s.lr_all == 1e-4, "lr_all");
  c.expect(s.epochs_heads == 5, "epochs_heads");
  c.expect(s.epochs_all == 35, "epochs_all");
  c.expect(s.momentum == 0.9, "momentum");
  c.expect(s.weight_decay == 1e-4, "weight_decay");
  c.expect(s.backbone == SegmenterBackbone::ResNet101, "backbone");
}

void end_to_end(Criterion& c) {
  const auto start = Clock::now();
  testing::Gen g(41);
  const auto train = testing::two_rectangle_dataset(g, 40, "train");
  const auto test = testing::two_rectangle_dataset(g, 10, "test");
  SegmenterConfig scfg;
  scfg.epochs_heads = 2;
  scfg.epochs_all = 6;
  scfg.seed = 11;
  const TrainedSegmenter seg = train_segmenter(train, scfg);
  const auto map50 = testing::segmenter_map(*seg.model, test, 0.5);
  c.expect(map50 && *map50 >= kSegmenterMap50, "segmenter mAP50 " + (map50 ? fmt(*map50) : "undefined"));
  c.note("segmenter mAP50 " + (map50 ? fmt(*map50) : "undefined") + " after " +
         std::to_string(scfg.epochs_heads + scfg.epochs_all) + " epochs");

  testing::Gen h(21);
  const auto data = testing::class_colored_dataset(h, 10, ClassifierMode::FiveClass);
  ClassifierConfig ccfg;
  ccfg.epochs = 20;
  ccfg.seed = 3;
  const TrainedClassifier clf = train_classifier(data, ccfg);
  const double acc = testing::classifier_accuracy(*clf.model, data);
  c.expect(acc >= kClassifierAccuracy, "classifier training accuracy " + fmt(acc));
  c.note("classifier training accuracy " + fmt(acc) + " after " + std::to_string(ccfg.epochs) + " epochs");

  const double secs = seconds_since(start);
  c.expect(secs <= kEndToEndBudgetSeconds, "took " + fmt(secs) + " s");
  c.note(fmt(secs) + " s");
}

void report_formats(Criterion& c) {
  using L = ImageClassLabel;
  std::vector<LabelPair> p;
  auto add = [&p](L t, L pr, int n) {
    for (int i = 0; i < n; ++i) p.push_back({t, pr});
  };
  add(L::Top, L::Top, 19);
  add(L::Top, L::Accessories, 1);
  add(L::Bottom, L::Bottom, 20);
  add(L::FullBody, L::FullBody, 13);
  add(L::FullBody, L::Bottom, 6);
  add(L::FullBody, L::HalfBody, 1);
  add(L::HalfBody, L::HalfBody, 15);
  add(L::HalfBody, L::Bottom, 4);
  add(L::HalfBody, L::FullBody, 1);
  add(L::Accessories, L::Accessories, 19);
  add(L::Accessories, L::Bottom, 1);
  c.expect(render_classification_report(classification_report(p)) ==
               read_golden("classification_report_5class.txt"),
           "classification report layout");

  const std::vector<MapTableRow> rows{
      {"Imagenet", {0.5, 0.38, 0.13, 0.05, 0.0}},
      {"COCO", {0.88, 0.73, 0.63, 0.27, 0.1}},
      {"ModaNet(10)", {0.95, 0.9, 0.85, 0.75, 0.25}},
      {"ModaNet(40)", {0.975, 0.975, 0.925, 0.75, 0.438}},
  };
  c.expect(render_map_table(kDefaultIouThresholds, rows) == read_golden("map_comparison.txt"), "mAP table layout");

  const std::vector<LabelPair> four{{L::Top, L::Top}, {L::Top, L::Bottom}, {L::Bottom, L::Bottom},
                                    {L::Bottom, L::Bottom}};
  const ClassificationReport r = classification_report(four, ClassifierMode::FourClass);
  c.expect(r.rows[0].precision == 1.0 && r.rows[0].recall == 0.5, "class A precision/recall");
  c.expect(r.rows[1].precision == 2.0 / 3.0 && r.rows[1].recall == 1.0, "class B precision/recall");
  c.expect(r.accuracy == 0.75, "accuracy");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"AP matches brute-force oracle on 500 instances", ap_oracle},
      {"worked AP example and mAP monotonicity", worked_ap},
      {"geometry properties", geometry},
      {"augmentation consistency", augmentation},
      {"routing truth table and per-class uniqueness", routing},
      {"training configuration defaults", configs},
      {"synthetic end-to-end training", end_to_end},
      {"report format goldens", report_formats},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok() ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!c.info().empty()) {
      std::cout << " (";
      for (std::size_t k = 0; k < c.info().size(); ++k) std::cout << (k ? "; " : "") << c.info()[k];
      std::cout << ")";
    }
    std::cout << "\n";
    for (const std::string& n : c.notes()) std::cout << "    " << n << "\n";
    if (!c.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
