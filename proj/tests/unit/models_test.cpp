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

#include <algorithm>

#include "garmentseg/models.hpp"
#include "test_support.hpp"

using namespace garmentseg;

namespace {

// Score vector summing to one with a random argmax.
std::vector<double> random_scores(testing::Gen& g, std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = g.real(0.01, 1.0);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("classifier defaults match the fine-tuning settings") {
  const ClassifierConfig c;
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.batch_size == 32);
  CHECK(c.loss == Loss::CategoricalCrossEntropy);
  CHECK(c.optimizer == Optimizer::Adam);
  CHECK(c.epochs == 500);
  CHECK(c.backbone == ClassifierBackbone::InceptionV3);
  CHECK(c.num_classes == 5);
  CHECK(to_string(c.optimizer) == "Adam");
}

TEST_CASE("segmenter defaults match the fine-tuning settings") {
  const SegmenterConfig s;
  CHECK(s.lr_heads == 1e-3);
  CHECK(s.lr_all == 1e-4);
  CHECK(s.epochs_heads == 5);
  CHECK(s.epochs_all == 35);
  CHECK(s.epochs_heads + s.epochs_all == 40);
  CHECK(s.momentum == 0.9);
  CHECK(s.weight_decay == 1e-4);
  CHECK(s.backbone == SegmenterBackbone::ResNet101);
  CHECK(s.init_weights == InitWeights::ModaNet);
  CHECK(s.init_weights_path.empty());
}

TEST_CASE("config JSON round trip") {
  ClassifierConfig c;
  c.learning_rate = 3e-3;
  c.batch_size = 8;
  c.epochs = 12;
  c.backbone = ClassifierBackbone::VGG16;
  c.num_classes = 4;
  c.seed = 77;
  const ClassifierConfig c2 = parse_classifier_config(to_json(c));
  CHECK(c2.learning_rate == c.learning_rate);
  CHECK(c2.batch_size == 8);
  CHECK(c2.epochs == 12);
  CHECK(c2.backbone == ClassifierBackbone::VGG16);
  CHECK(c2.num_classes == 4);
  CHECK(c2.seed == 77);
  CHECK(to_json(c2) == to_json(c));

  SegmenterConfig s;
  s.lr_heads = 0.05;
  s.epochs_all = 3;
  s.init_weights = InitWeights::COCO;
  s.init_weights_path = "/models/coco";
  s.pixels_per_image = 99;
  const SegmenterConfig s2 = parse_segmenter_config(to_json(s));
  CHECK(to_json(s2) == to_json(s));
  CHECK(s2.init_weights == InitWeights::COCO);
}

TEST_CASE("partial configs override only present keys") {
  const ClassifierConfig c = parse_classifier_config(R"({"epochs": 20})");
  CHECK(c.epochs == 20);
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.batch_size == 32);
  const SegmenterConfig s = parse_segmenter_config(R"({"epochs_heads": 1, "epochs_all": 2})");
  CHECK(s.epochs_heads == 1);
  CHECK(s.lr_heads == 1e-3);
}

TEST_CASE("bad configs") {
  auto cls = [](const char* text) {
    return testing::error_code_of([&] { parse_classifier_config(text); });
  };
  auto seg = [](const char* text) {
    return testing::error_code_of([&] { parse_segmenter_config(text); });
  };
  CHECK(cls(R"({"learning_rte": 1})") == ErrorCode::kInvalidArgument);
  CHECK(cls(R"({"learning_rate": -1})") == ErrorCode::kInvalidArgument);
  CHECK(cls(R"({"batch_size": 2.5})") == ErrorCode::kInvalidArgument);
  CHECK(cls(R"({"optimizer": "SGD"})") == ErrorCode::kInvalidArgument);
  CHECK(cls(R"({"num_classes": 3})") == ErrorCode::kInvalidArgument);
  CHECK(cls("[]") == ErrorCode::kInvalidArgument);
  CHECK(cls("{") == ErrorCode::kInvalidArgument);
  CHECK(seg(R"({"momentum": 1.0})") == ErrorCode::kInvalidArgument);
  CHECK(seg(R"({"init_weights": "JFT"})") == ErrorCode::kInvalidArgument);
  CHECK(seg(R"({"epochs_heads": 0, "epochs_all": 0})") == ErrorCode::kInvalidArgument);
  CHECK(seg(R"({"heads": 1})") == ErrorCode::kInvalidArgument);
}

TEST_CASE("label names") {
  CHECK(parse_image_class_label("full body") == ImageClassLabel::FullBody);
  CHECK(parse_image_class_label("Half_Bodies") == ImageClassLabel::HalfBody);
  CHECK(parse_image_class_label("TOPS") == ImageClassLabel::Top);
  CHECK(parse_image_class_label("accessory") == ImageClassLabel::Accessories);
  CHECK_FALSE(parse_image_class_label("shoes"));
  for (ImageClassLabel l : kAllImageClassLabels) {
    CHECK(parse_image_class_label(to_string(l)) == l);
    CHECK(parse_image_class_label(display_name(l)) == l);
  }
  CHECK(labels_for(ClassifierMode::FourClass).size() == 4);
  CHECK(testing::error_code_of([] {
          label_index(ImageClassLabel::Accessories, ClassifierMode::FourClass);
        }) == ErrorCode::kMixedModes);
  CHECK(input_convention(ClassifierBackbone::InceptionV3).input_size == 299);
  CHECK(input_convention(ClassifierBackbone::ResNet50).input_size == 224);
}

TEST_CASE("fixed classifier") {
  const FixedClassifier c(ImageClassLabel::HalfBody, 0.7);
  const Classification r = c.classify(Image(4, 4));
  CHECK(r.label == ImageClassLabel::HalfBody);
  CHECK(r.score == 0.7);
  REQUIRE(r.scores.size() == 5);
  CHECK(r.scores[0] == doctest::Approx(0.075));
  CHECK(c.name() == "mock:fixed:HalfBody@0.7");
  CHECK(FixedClassifier(ImageClassLabel::Top, 0.9, ClassifierMode::FourClass).classify(Image(1, 1)).scores.size() == 4);
  CHECK(testing::error_code_of([] { FixedClassifier(ImageClassLabel::Top, 1.5); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("classify reports the argmax of valid score vectors") {
  testing::Gen g(3);
  for (int trial = 0; trial < 200; ++trial) {
    const ClassifierMode mode = g.coin() ? ClassifierMode::FiveClass : ClassifierMode::FourClass;
    const auto scores = random_scores(g, labels_for(mode).size());
    const Classification r = FixedClassifier(scores, mode).classify(Image(2, 2));
    const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
    CHECK(r.label == labels_for(mode)[static_cast<std::size_t>(best)]);
    CHECK(r.score == scores[static_cast<std::size_t>(best)]);
    CHECK(r.scores == scores);
  }
}

TEST_CASE("classify rejects contract violations") {
  auto code = [](std::vector<double> s, ClassifierMode m) {
    return testing::error_code_of([&] { FixedClassifier(s, m).classify(Image(1, 1)); });
  };
  CHECK(code({0.5, 0.5}, ClassifierMode::FiveClass) == ErrorCode::kBackendFailure);
  CHECK(code({0.5, 0.5, 0.5, 0.5}, ClassifierMode::FourClass) == ErrorCode::kBackendFailure);
  CHECK(code({1.2, -0.2, 0, 0}, ClassifierMode::FourClass) == ErrorCode::kBackendFailure);
  CHECK_FALSE(code({0.25, 0.25, 0.25, 0.25}, ClassifierMode::FourClass));
}

TEST_CASE("detections") {
  BinaryMask m(10, 8);
  m.set(2, 3);
  m.set(5, 6);
  const Detection d = make_detection(m, GarmentClass::Bottom, 0.4);
  CHECK(d.box == BBox{2, 3, 5, 6});
  CHECK(testing::error_code_of([] { make_detection(BinaryMask(3, 3), GarmentClass::Top, 0.5); }) ==
        ErrorCode::kEmptyMask);
  CHECK(testing::error_code_of([&] { make_detection(m, GarmentClass::Top, 1.01); }) ==
        ErrorCode::kInvalidArgument);
  Detection bad = d;
  bad.box.x_max = 9;
  CHECK(testing::error_code_of([&] { check_detection(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("fixed segmenter sorts by score and keeps box invariants") {
  testing::Gen g(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<MockDetection> mocks;
    const int n = g.integer(0, 6);
    for (int i = 0; i < n; ++i) {
      const double x0 = g.real(0, 0.8), y0 = g.real(0, 0.8);
      mocks.push_back({g.coin() ? GarmentClass::Top : GarmentClass::Bottom,
                       static_cast<double>(g.integer(0, 4)) / 4.0,
                       {x0, y0, g.real(x0 + 0.05, 1.0), g.real(y0 + 0.05, 1.0)}});
    }
    const int w = g.integer(5, 60), h = g.integer(5, 60);
    const auto dets = FixedSegmenter(mocks).detect(Image(w, h));
    REQUIRE(dets.size() == mocks.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
      CHECK(dets[i].box == mask_to_bbox(dets[i].mask));
      CHECK(dets[i].mask.width() == w);
      if (i > 0) CHECK(dets[i - 1].score >= dets[i].score);
    }
    // Stable: equal scores keep input order.
    std::vector<std::size_t> order(mocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mocks[a].score > mocks[b].score; });
    for (std::size_t i = 0; i < dets.size(); ++i) CHECK(dets[i].cls == mocks[order[i]].cls);
  }
}

TEST_CASE("relative boxes") {
  CHECK(to_pixel_box({0.25, 0.1, 0.75, 0.5}, 100, 50) == BBox{25, 5, 74, 24});
  CHECK(to_pixel_box({0, 0, 1, 1}, 7, 3) == BBox{0, 0, 6, 2});
  CHECK(to_pixel_box({0.5, 0.5, 0.5, 0.5}, 10, 10).area() == 1);
}

TEST_CASE("backend registry") {
  const auto c = make_classifier("mock:fixed:FullBody@0.8");
  CHECK(c->mode() == ClassifierMode::FiveClass);
  CHECK(c->classify(Image(2, 2)).label == ImageClassLabel::FullBody);
  CHECK(make_classifier("mock:fixed:Top@0.8:4")->mode() == ClassifierMode::FourClass);
  CHECK(make_segmenter("mock:none")->detect(Image(8, 8)).empty());
  const auto halves = make_segmenter("mock:halves")->detect(Image(40, 40));
  REQUIRE(halves.size() == 2);
  CHECK(halves[0].cls == GarmentClass::Top);
  const auto fixed = make_segmenter("mock:fixed:bottom@0.6@0,0.5,1,1;top@0.9@0,0,1,0.5")->detect(Image(10, 10));
  REQUIRE(fixed.size() == 2);
  CHECK(fixed[0].cls == GarmentClass::Top);
  CHECK(fixed[1].box == BBox{0, 5, 9, 9});

  for (const char* spec : {"mock:fixed:Shoes@0.5", "mock:fixed:Top", "mock:fixed:Top@x", "mock:other",
                           "/no/such/model"}) {
    CHECK(testing::error_code_of([&] { make_classifier(spec); }) == ErrorCode::kBackendUnavailable);
  }
  for (const char* spec : {"mock:fixed:top@0.5", "mock:fixed:hat@0.5@0,0,1,1", "/no/such/model"}) {
    CHECK(testing::error_code_of([&] { make_segmenter(spec); }) == ErrorCode::kBackendUnavailable);
  }
}

}  // TEST_SUITE
