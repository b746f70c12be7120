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
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unistd.h>

namespace testing {

using garmentseg::GarmentClass;
using garmentseg::GroundTruth;
using garmentseg::ImageClassLabel;
using garmentseg::IouKind;
using garmentseg::Rgb;
using garmentseg::ScoredDetection;

std::vector<Point> random_convex_polygon(Gen& g, double cx, double cy, double rx, double ry,
                                         int min_vertices, int max_vertices) {
  const int n = g.integer(min_vertices, max_vertices);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(g.real(0.0, 2.0 * std::numbers::pi));
  std::sort(angles.begin(), angles.end());
  std::vector<Point> poly;
  for (double a : angles) poly.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  return poly;
}

std::vector<Point> random_star_polygon(Gen& g, double cx, double cy, double r_min, double r_max,
                                       int vertices) {
  std::vector<Point> poly;
  for (int i = 0; i < vertices; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + g.real(0.1, 0.9)) / vertices;
    const double r = g.real(r_min, r_max);
    poly.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return poly;
}

BinaryMask random_mask(Gen& g, int width, int height, double density) {
  BinaryMask m(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (g.coin(density)) m.set(x, y);
  return m;
}

BinaryMask random_blob_mask(Gen& g, int width, int height, int rectangles) {
  BinaryMask m(width, height);
  for (int k = 0; k < rectangles; ++k) {
    const BBox b = random_box(g, width, height);
    for (int y = b.y_min; y <= b.y_max; ++y)
      for (int x = b.x_min; x <= b.x_max; ++x) m.set(x, y);
  }
  return m;
}

BBox random_box(Gen& g, int width, int height) {
  int x0 = g.integer(0, width - 1);
  int x1 = g.integer(0, width - 1);
  int y0 = g.integer(0, height - 1);
  int y1 = g.integer(0, height - 1);
  return {std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
}

BinaryMask brute_force_raster(const std::vector<Point>& poly, int width, int height) {
  BinaryMask m(width, height);
  const std::size_t n = poly.size();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      int crossings = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const Point& a = poly[(k + n - 1) % n];
        const Point& b = poly[k];
        if ((a.y > py) == (b.y > py)) continue;
        const double cross = (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x;
        if (px < cross) ++crossings;
      }
      if (crossings % 2 == 1) m.set(x, y);
    }
  }
  return m;
}

double shoelace(const std::vector<Point>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    s += (p.x + q.x) * (q.y - p.y);
  }
  return std::abs(s) / 2.0;
}

double count_iou(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0;
  long uni = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const bool p = a.get(x, y);
      const bool q = b.get(x, y);
      inter += p && q;
      uni += p || q;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

BinaryMask box_pixels(const BBox& b, int width, int height) {
  BinaryMask m(width, height);
  for (int y = std::max(0, b.y_min); y <= std::min(height - 1, b.y_max); ++y)
    for (int x = std::max(0, b.x_min); x <= std::min(width - 1, b.x_max); ++x) m.set(x, y);
  return m;
}

BBox tight_box(const BinaryMask& m) {
  BBox b{m.width(), m.height(), -1, -1};
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      b.x_min = std::min(b.x_min, x);
      b.y_min = std::min(b.y_min, y);
      b.x_max = std::max(b.x_max, x);
      b.y_max = std::max(b.y_max, y);
    }
  }
  return b;
}

double oracle_iou(const GroundTruth& gt, const garmentseg::Detection& d, IouKind kind) {
  const int w = d.mask.width();
  const int h = d.mask.height();
  if (kind == IouKind::Box) {
    const int W = std::max(gt.box.x_max, d.box.x_max) + 1;
    const int H = std::max(gt.box.y_max, d.box.y_max) + 1;
    return count_iou(box_pixels(gt.box, W, H), box_pixels(d.box, W, H));
  }
  return count_iou(gt.mask ? *gt.mask : box_pixels(gt.box, w, h), d.mask);
}

}  // namespace

std::optional<double> oracle_ap(const std::vector<GroundTruth>& gts,
                                const std::vector<ScoredDetection>& dets, GarmentClass cls,
                                double threshold, IouKind kind) {
  std::vector<std::size_t> gt_idx;
  for (std::size_t i = 0; i < gts.size(); ++i)
    if (gts[i].cls == cls) gt_idx.push_back(i);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (dets[i].detection.cls == cls) ranked.push_back({-dets[i].detection.score, i});
  if (gt_idx.empty()) return ranked.empty() ? std::nullopt : std::optional<double>(0.0);
  std::sort(ranked.begin(), ranked.end());

  std::vector<bool> used(gts.size(), false);
  std::vector<double> recall;
  std::vector<double> precision;
  int tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const ScoredDetection& d = dets[ranked[k].second];
    double best = -1.0;
    std::size_t pick = 0;
    for (std::size_t g : gt_idx) {
      if (used[g] || gts[g].image_id != d.image_id) continue;
      const double iou = oracle_iou(gts[g], d.detection, kind);
      if (iou > best) {
        best = iou;
        pick = g;
      }
    }
    if (best >= threshold) {
      used[pick] = true;
      ++tp;
    }
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gt_idx.size()));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
  }

  double ap = 0.0;
  double last = 0.0;
  for (std::size_t k = 0; k < recall.size(); ++k) {
    if (recall[k] <= last) continue;
    double p = 0.0;
    for (std::size_t j = 0; j < recall.size(); ++j)
      if (recall[j] >= recall[k]) p = std::max(p, precision[j]);
    ap += (recall[k] - last) * p;
    last = recall[k];
  }
  return ap;
}

ApInstance random_ap_instance(Gen& g, int max_images, int max_gts, int max_dets, int size) {
  ApInstance inst;
  const int images = g.integer(1, max_images);
  auto image_id = [&g, images] { return "img" + std::to_string(g.integer(0, images - 1)); };
  auto any_class = [&g] { return g.coin() ? GarmentClass::Top : GarmentClass::Bottom; };
  const int n_gt = g.integer(0, max_gts);
  for (int i = 0; i < n_gt; ++i) {
    BinaryMask m = random_blob_mask(g, size, size, g.integer(1, 2));
    inst.gts.push_back(GroundTruth::from_mask(image_id(), any_class(), std::move(m)));
  }
  const int n_det = g.integer(0, max_dets);
  for (int i = 0; i < n_det; ++i) {
    BinaryMask m(size, size);
    std::string id = image_id();
    GarmentClass cls = any_class();
    if (!inst.gts.empty() && g.coin(0.6)) {
      // Jittered copy of a ground truth.
      const GroundTruth& src = inst.gts[static_cast<std::size_t>(g.integer(0, n_gt - 1))];
      id = src.image_id;
      cls = g.coin(0.85) ? src.cls : any_class();
      const int dx = g.integer(-3, 3);
      const int dy = g.integer(-3, 3);
      for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
          const int sx = x - dx;
          const int sy = y - dy;
          if (sx >= 0 && sy >= 0 && sx < size && sy < size && src.mask->get(sx, sy)) m.set(x, y);
        }
      }
    }
    if (m.empty()) m = random_blob_mask(g, size, size, 1);
    // Coarse scores make ties common.
    const double score = g.coin(0.3) ? g.integer(0, 4) * 0.25 : g.real(0.0, 1.0);
    inst.dets.push_back({id, garmentseg::make_detection(std::move(m), cls, score)});
  }
  return inst;
}

SyntheticGarmentImage two_rectangle_image(Gen& g, const std::string& id, int width, int height) {
  const Rgb bg{static_cast<std::uint8_t>(g.integer(215, 240)),
               static_cast<std::uint8_t>(g.integer(215, 240)),
               static_cast<std::uint8_t>(g.integer(215, 240))};
  const Rgb top{static_cast<std::uint8_t>(g.integer(170, 230)),
                static_cast<std::uint8_t>(g.integer(30, 70)),
                static_cast<std::uint8_t>(g.integer(30, 70))};
  const Rgb bottom{static_cast<std::uint8_t>(g.integer(30, 70)),
                   static_cast<std::uint8_t>(g.integer(50, 90)),
                   static_cast<std::uint8_t>(g.integer(150, 210))};

  const int tx0 = g.integer(width * 15 / 100, width * 25 / 100);
  const int tx1 = g.integer(width * 75 / 100, width * 85 / 100);
  const int ty0 = g.integer(height * 6 / 100, height * 14 / 100);
  const int ty1 = g.integer(height * 44 / 100, height * 52 / 100);
  const int bx0 = g.integer(width * 25 / 100, width * 32 / 100);
  const int bx1 = g.integer(width * 68 / 100, width * 75 / 100);
  const int by0 = ty1 + g.integer(0, 2);
  const int by1 = g.integer(height * 85 / 100, height * 93 / 100);

  SyntheticGarmentImage out;
  out.image = Image(width, height, bg);
  auto paint = [&](int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) out.image.set(x, y, c);
  };
  paint(tx0, ty0, tx1, ty1, top);
  paint(bx0, by0, bx1, by1, bottom);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int v = out.image.channel(x, y, c) + g.integer(-6, 6);
        out.image.set_channel(x, y, c, static_cast<std::uint8_t>(std::clamp(v, 0, 255)));
      }
    }
  }
  auto rect = [](int x0, int y0, int x1, int y1) {
    return std::vector<Point>{{double(x0), double(y0)}, {double(x1), double(y0)},
                              {double(x1), double(y1)}, {double(x0), double(y1)}};
  };
  out.annotations.image_id = id;
  out.annotations.width = width;
  out.annotations.height = height;
  out.annotations.annotations = {{GarmentClass::Top, rect(tx0, ty0, tx1, ty1)},
                                 {GarmentClass::Bottom, rect(bx0, by0, bx1, by1)}};
  return out;
}

Image class_colored_image(Gen& g, ImageClassLabel label, int size) {
  static const Rgb base[] = {{200, 40, 40}, {40, 40, 200}, {40, 180, 40}, {200, 200, 40}, {150, 40, 150}};
  const Rgb b = base[static_cast<int>(label)];
  const int jr = g.integer(-15, 15);
  const int jg = g.integer(-15, 15);
  const int jb = g.integer(-15, 15);
  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      auto ch = [&g](int v, int j) {
        return static_cast<std::uint8_t>(std::clamp(v + j + g.integer(-20, 20), 0, 255));
      };
      img.set(x, y, {ch(b.r, jr), ch(b.g, jg), ch(b.b, jb)});
    }
  }
  return img;
}

std::vector<garmentseg::SegmentationSample> two_rectangle_dataset(Gen& g, int n,
                                                                  const std::string& prefix) {
  std::vector<garmentseg::SegmentationSample> out;
  for (int i = 0; i < n; ++i) {
    SyntheticGarmentImage s = two_rectangle_image(g, prefix + std::to_string(i));
    out.push_back({std::move(s.image), std::move(s.annotations)});
  }
  return out;
}

std::vector<garmentseg::LabeledImage> class_colored_dataset(Gen& g, int per_class,
                                                            garmentseg::ClassifierMode mode) {
  std::vector<garmentseg::LabeledImage> out;
  for (int i = 0; i < per_class; ++i) {
    for (ImageClassLabel label : garmentseg::labels_for(mode)) {
      out.push_back({class_colored_image(g, label), label});
    }
  }
  return out;
}

std::optional<double> segmenter_map(const garmentseg::SegmenterBackend& model,
                                    const std::vector<garmentseg::SegmentationSample>& samples,
                                    double threshold) {
  std::vector<garmentseg::GroundTruth> gts;
  std::vector<garmentseg::ScoredDetection> dets;
  for (const auto& s : samples) {
    const auto& a = s.annotations;
    for (const auto& poly : a.annotations) {
      gts.push_back(garmentseg::GroundTruth::from_mask(a.image_id, poly.label,
                                                      rasterize(poly, a.width, a.height)));
    }
    for (auto& d : model.detect(s.image)) dets.push_back({a.image_id, std::move(d)});
  }
  const double thresholds[] = {threshold};
  return garmentseg::map_over_thresholds(gts, dets, thresholds).map.front();
}

double classifier_accuracy(const garmentseg::ClassifierBackend& model,
                           const std::vector<garmentseg::LabeledImage>& samples) {
  std::size_t correct = 0;
  for (const auto& s : samples) {
    if (model.classify(s.image).label == s.label) ++correct;
  }
  return samples.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("garmentseg_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
