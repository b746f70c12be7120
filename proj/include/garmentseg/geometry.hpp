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
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace garmentseg {

// Continuous pixel coordinates: origin at the top-left image corner, x to
// the right, y downwards. Pixel (i, j) covers [i, i+1) x [j, j+1).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Inclusive integer pixel box.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  long long area() const noexcept {
    return static_cast<long long>(x_max - x_min + 1) *
           static_cast<long long>(y_max - y_min + 1);
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool get(int x, int y) const noexcept {
    return bits_[index(x, y)] != 0;
  }
  void set(int x, int y, bool on = true) noexcept {
    bits_[index(x, y)] = on ? 1 : 0;
  }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  // Row-major, one byte per pixel holding 0 or 1.
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Absolute shoelace area of the implicitly closed polygon.
double polygon_area(std::span<const Point> vertices);

// Even-odd point-in-polygon test with half-open edges: an edge counts as a
// crossing when exactly one endpoint lies strictly below the scanline, and
// the point counts as left of the crossing only when p.x is strictly less
// than the intersection abscissa.
bool point_in_polygon(std::span<const Point> vertices, Point p);

// Sets pixel (i, j) iff its centre (i+0.5, j+0.5) is inside the polygon
// under point_in_polygon's rule. Throws kDegeneratePolygon for fewer than 3
// vertices or zero area, kInvalidArgument for non-positive dimensions.
BinaryMask rasterize(std::span<const Point> vertices, int width, int height);

// Sutherland-Hodgman clip against [0, width] x [0, height].
std::vector<Point> clip_polygon(std::span<const Point> vertices, double width,
                                double height);

// |a and b| / |a or b|; 0 when both masks are empty. Throws
// kDimensionMismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

double box_iou(const BBox& a, const BBox& b);

// Tightest inclusive box. Throws kEmptyMask.
BBox mask_to_bbox(const BinaryMask& m);

BinaryMask filled_box(const BBox& box, int width, int height);

// Pixel-wise union and intersection; both throw kDimensionMismatch.
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);

struct Component {
  std::size_t size = 0;
  BBox bounds;
  int label = 0;
};

// 4-connected component labelling. Labels are 1-based and assigned in raster
// order of each component's first pixel; 0 marks background.
struct ComponentLabels {
  std::vector<int> labels;
  std::vector<Component> components;
};
ComponentLabels label_components(const BinaryMask& m);

// Keeps only the largest 4-connected component. Ties go to the component
// with the smaller (y_min, x_min) bounding-box corner, then to the one that
// comes first in raster order.
BinaryMask largest_component(const BinaryMask& m);

// Single channel PNG with 0/255 values.
void save_mask_png(const std::filesystem::path& path, const BinaryMask& m);
// Any non-zero pixel is foreground. Throws kDecodeFailure.
BinaryMask load_mask_png(const std::filesystem::path& path);

}  // namespace garmentseg
