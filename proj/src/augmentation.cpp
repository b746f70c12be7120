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
#include "garmentseg/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "garmentseg/error.hpp"
#include "rng.hpp"

namespace garmentseg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct RotationFrame {
  double cos_t = 1.0;
  double sin_t = 0.0;
  Point src_center;
  Point dst_center;
  ImageDims dst;
};

// Exact sine/cosine at multiples of 90 degrees so quarter turns do not
// smear pixels.
std::pair<double, double> cos_sin_degrees(double degrees) {
  const double quarters = degrees / 90.0;
  if (quarters == std::round(quarters)) {
    switch (((static_cast<long long>(quarters) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

RotationFrame rotation_frame(const Rotate& r, ImageDims dims) {
  RotationFrame f;
  std::tie(f.cos_t, f.sin_t) = cos_sin_degrees(r.degrees);
  f.src_center = {dims.width / 2.0, dims.height / 2.0};
  if (r.expand_canvas) {
    const double ac = std::abs(f.cos_t);
    const double as = std::abs(f.sin_t);
    f.dst.width = static_cast<int>(std::ceil(dims.width * ac + dims.height * as - 1e-9));
    f.dst.height = static_cast<int>(std::ceil(dims.width * as + dims.height * ac - 1e-9));
    f.dst.width = std::max(f.dst.width, 1);
    f.dst.height = std::max(f.dst.height, 1);
  } else {
    f.dst = dims;
  }
  f.dst_center = {f.dst.width / 2.0, f.dst.height / 2.0};
  return f;
}

Point rotate_forward(const RotationFrame& f, Point p) {
  const double dx = p.x - f.src_center.x;
  const double dy = p.y - f.src_center.y;
  return {f.dst_center.x + f.cos_t * dx + f.sin_t * dy,
          f.dst_center.y - f.sin_t * dx + f.cos_t * dy};
}

Point rotate_inverse(const RotationFrame& f, Point q) {
  const double dx = q.x - f.dst_center.x;
  const double dy = q.y - f.dst_center.y;
  return {f.src_center.x + f.cos_t * dx - f.sin_t * dy,
          f.src_center.y + f.sin_t * dx + f.cos_t * dy};
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

Image rotate_image(const Rotate& r, const Image& img) {
  const RotationFrame f = rotation_frame(r, {img.width(), img.height()});
  Image out(f.dst.width, f.dst.height);
  if (img.empty()) return out;
  for (int j = 0; j < out.height(); ++j) {
    for (int i = 0; i < out.width(); ++i) {
      const Point q = rotate_inverse(f, {i + 0.5, j + 0.5});
      if (q.x < 0.0 || q.y < 0.0 || q.x > img.width() || q.y > img.height()) continue;
      // Bilinear interpolation between pixel centres, edge-replicated.
      const double u = q.x - 0.5;
      const double v = q.y - 0.5;
      const double fu = std::floor(u);
      const double fv = std::floor(v);
      const double ax = u - fu;
      const double ay = v - fv;
      const int x0 = std::clamp(static_cast<int>(fu), 0, img.width() - 1);
      const int y0 = std::clamp(static_cast<int>(fv), 0, img.height() - 1);
      const int x1 = std::clamp(static_cast<int>(fu) + 1, 0, img.width() - 1);
      const int y1 = std::clamp(static_cast<int>(fv) + 1, 0, img.height() - 1);
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - ax) * img.channel(x0, y0, c) + ax * img.channel(x1, y0, c);
        const double bot = (1.0 - ax) * img.channel(x0, y1, c) + ax * img.channel(x1, y1, c);
        out.set_channel(i, j, c, to_byte((1.0 - ay) * top + ay * bot));
      }
    }
  }
  return out;
}

BinaryMask rotate_mask(const Rotate& r, const BinaryMask& m) {
  const RotationFrame f = rotation_frame(r, {m.width(), m.height()});
  BinaryMask out(f.dst.width, f.dst.height);
  for (int j = 0; j < out.height(); ++j) {
    for (int i = 0; i < out.width(); ++i) {
      const Point q = rotate_inverse(f, {i + 0.5, j + 0.5});
      const double sx = std::floor(q.x);
      const double sy = std::floor(q.y);
      if (sx < 0.0 || sy < 0.0 || sx >= m.width() || sy >= m.height()) continue;
      if (m.get(static_cast<int>(sx), static_cast<int>(sy))) out.set(i, j);
    }
  }
  return out;
}

Image flip_image(const Image& img) {
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(img.width() - 1 - x, y, img.at(x, y));
  return out;
}

BinaryMask flip_mask(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.set(m.width() - 1 - x, y, m.get(x, y));
  return out;
}

std::vector<double> gaussian_kernel(double radius) {
  const int half = static_cast<int>(std::ceil(radius));
  const double sigma = radius / 2.0;
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + half)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

Image blur_image(const Blur& b, const Image& img) {
  if (b.radius == 0.0 || img.empty()) return img;
  const std::vector<double> k = gaussian_kernel(b.radius);
  const int half = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          const int sx = std::clamp(x + t, 0, w - 1);
          acc += k[static_cast<std::size_t>(t + half)] * img.channel(sx, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) {
          const int sy = std::clamp(y + t, 0, h - 1);
          acc += k[static_cast<std::size_t>(t + half)] *
                 tmp[(static_cast<std::size_t>(sy) * w + x) * 3 + c];
        }
        out.set_channel(x, y, c, to_byte(acc));
      }
    }
  }
  return out;
}

Image noise_image(const AddNoise& n, const Image& img) {
  if (n.sigma == 0.0) return img;
  detail::Rng rng(n.seed);
  Image out = img;
  for (std::uint8_t& v : out.data()) v = to_byte(v + n.sigma * rng.normal());
  return out;
}

}  // namespace

void validate(const AugmentOp& op) {
  std::visit(overloaded{
                 [](const Rotate& r) {
                   if (!std::isfinite(r.degrees) || r.degrees <= -360.0 || r.degrees >= 360.0) {
                     fail(ErrorCode::kInvalidArgument, "rotation angle must be in (-360, 360)");
                   }
                 },
                 [](const FlipHorizontal&) {},
                 [](const Blur& b) {
                   if (!std::isfinite(b.radius) || b.radius < 0.0) {
                     fail(ErrorCode::kInvalidArgument, "blur radius must be >= 0");
                   }
                 },
                 [](const AddNoise& n) {
                   if (!std::isfinite(n.sigma) || n.sigma < 0.0) {
                     fail(ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
                   }
                 },
             },
             op);
}

bool is_geometric(const AugmentOp& op) {
  return std::holds_alternative<Rotate>(op) || std::holds_alternative<FlipHorizontal>(op);
}

std::string describe(const AugmentOp& op) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&os](const Rotate& r) {
                   os << "rotate(" << r.degrees << (r.expand_canvas ? ", expand)" : ")");
                 },
                 [&os](const FlipHorizontal&) { os << "flip_horizontal"; },
                 [&os](const Blur& b) { os << "blur(" << b.radius << ")"; },
                 [&os](const AddNoise& n) { os << "noise(" << n.sigma << ", seed " << n.seed << ")"; },
             },
             op);
  return os.str();
}

ImageDims output_dims(const AugmentOp& op, ImageDims dims) {
  if (const auto* r = std::get_if<Rotate>(&op)) return rotation_frame(*r, dims).dst;
  return dims;
}

Point transform_point(const AugmentOp& op, Point p, ImageDims dims) {
  if (const auto* r = std::get_if<Rotate>(&op)) return rotate_forward(rotation_frame(*r, dims), p);
  if (std::holds_alternative<FlipHorizontal>(op)) return {dims.width - p.x, p.y};
  return p;
}

Image apply_to_image(const AugmentOp& op, const Image& img) {
  validate(op);
  return std::visit(overloaded{
                        [&img](const Rotate& r) { return rotate_image(r, img); },
                        [&img](const FlipHorizontal&) { return flip_image(img); },
                        [&img](const Blur& b) { return blur_image(b, img); },
                        [&img](const AddNoise& n) { return noise_image(n, img); },
                    },
                    op);
}

BinaryMask apply_to_mask(const AugmentOp& op, const BinaryMask& mask) {
  validate(op);
  if (const auto* r = std::get_if<Rotate>(&op)) return rotate_mask(*r, mask);
  if (std::holds_alternative<FlipHorizontal>(op)) return flip_mask(mask);
  return mask;
}

PolygonAnnotation apply_to_polygon(const AugmentOp& op, const PolygonAnnotation& poly,
                                   ImageDims dims) {
  validate(op);
  PolygonAnnotation out;
  out.label = poly.label;
  out.vertices.reserve(poly.vertices.size());
  for (const Point& p : poly.vertices) out.vertices.push_back(transform_point(op, p, dims));
  return out;
}

Sample augment_sample(std::span<const AugmentOp> ops, Sample sample) {
  if (sample.image.width() != sample.annotations.width ||
      sample.image.height() != sample.annotations.height) {
    fail(ErrorCode::kDimensionMismatch,
         "image \"" + sample.annotations.image_id + "\" does not match its annotation size");
  }
  for (const AugmentOp& op : ops) {
    validate(op);
    const ImageDims dims{sample.annotations.width, sample.annotations.height};
    const ImageDims next = output_dims(op, dims);
    sample.image = apply_to_image(op, sample.image);
    std::vector<PolygonAnnotation> kept;
    for (const PolygonAnnotation& poly : sample.annotations.annotations) {
      PolygonAnnotation moved = apply_to_polygon(op, poly, dims);
      moved.vertices = clip_polygon(moved.vertices, next.width, next.height);
      if (moved.vertices.size() >= 3 && polygon_area(moved.vertices) > 0.0) {
        kept.push_back(std::move(moved));
      }
    }
    sample.annotations.annotations = std::move(kept);
    sample.annotations.width = next.width;
    sample.annotations.height = next.height;
  }
  return sample;
}

}  // namespace garmentseg
