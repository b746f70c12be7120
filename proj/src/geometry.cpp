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
#include "garmentseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "garmentseg/error.hpp"

namespace garmentseg {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kDimensionMismatch,
         "mask dimensions differ: " + std::to_string(a.width()) + "x" +
             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
             "x" + std::to_string(b.height()));
  }
}

// Abscissa where edge (a, b) meets the horizontal line at y. Shared by the
// point test and the scanline fill so both apply identical rounding.
double crossing_x(const Point& a, const Point& b, double y) {
  return (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x;
}

bool edge_spans(const Point& a, const Point& b, double y) {
  return (a.y > y) != (b.y > y);
}

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    fail(ErrorCode::kInvalidArgument, "mask dimensions must be non-negative");
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

double polygon_area(std::span<const Point> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = vertices[i];
    const Point& q = vertices[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) / 2.0;
}

bool point_in_polygon(std::span<const Point> vertices, Point p) {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[j];
    const Point& b = vertices[i];
    if (edge_spans(a, b, p.y) && p.x < crossing_x(a, b, p.y)) inside = !inside;
  }
  return inside;
}

BinaryMask rasterize(std::span<const Point> vertices, int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
  }
  if (vertices.size() < 3) {
    fail(ErrorCode::kDegeneratePolygon, "polygon needs at least 3 vertices");
  }
  if (polygon_area(vertices) == 0.0) {
    fail(ErrorCode::kDegeneratePolygon, "polygon has zero area");
  }

  BinaryMask mask(width, height);
  std::vector<double> xs;
  const std::size_t n = vertices.size();
  for (int row = 0; row < height; ++row) {
    const double cy = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      if (edge_spans(vertices[j], vertices[i], cy)) {
        xs.push_back(crossing_x(vertices[j], vertices[i], cy));
      }
    }
    std::sort(xs.begin(), xs.end());
    // A centre cx is inside iff an odd number of crossings lie strictly to
    // its right, i.e. cx in [xs[2k], xs[2k+1]).
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double lo = xs[k];
      const double hi = xs[k + 1];
      long long first = static_cast<long long>(std::ceil(lo - 0.5));
      while (first + 0.5 < lo) ++first;
      while (static_cast<double>(first - 1) + 0.5 >= lo) --first;
      first = std::max<long long>(first, 0);
      for (long long col = first; col < width && static_cast<double>(col) + 0.5 < hi; ++col) {
        mask.set(static_cast<int>(col), row);
      }
    }
  }
  return mask;
}

std::vector<Point> clip_polygon(std::span<const Point> vertices, double width,
                                double height) {
  std::vector<Point> out(vertices.begin(), vertices.end());
  // Each clip edge: keep points where inside(p) holds.
  auto clip = [&out](auto inside, auto intersect) {
    std::vector<Point> in = std::move(out);
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& cur = in[i];
      const Point& prev = in[(i + n - 1) % n];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(prev, cur));
      }
    }
  };
  auto at_x = [](double x) {
    return [x](const Point& a, const Point& b) {
      const double t = (x - a.x) / (b.x - a.x);
      return Point{x, a.y + t * (b.y - a.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](const Point& a, const Point& b) {
      const double t = (y - a.y) / (b.y - a.y);
      return Point{a.x + t * (b.x - a.x), y};
    };
  };
  clip([](const Point& p) { return p.x >= 0.0; }, at_x(0.0));
  clip([width](const Point& p) { return p.x <= width; }, at_x(width));
  clip([](const Point& p) { return p.y >= 0.0; }, at_y(0.0));
  clip([height](const Point& p) { return p.y <= height; }, at_y(height));
  return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += static_cast<std::size_t>(ab[i] & bb[i]);
    uni += static_cast<std::size_t>(ab[i] | bb[i]);
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const BBox& a, const BBox& b) {
  const int ix0 = std::max(a.x_min, b.x_min);
  const int iy0 = std::max(a.y_min, b.y_min);
  const int ix1 = std::min(a.x_max, b.x_max);
  const int iy1 = std::min(a.y_max, b.y_max);
  if (ix1 < ix0 || iy1 < iy0) return 0.0;
  const long long inter =
      static_cast<long long>(ix1 - ix0 + 1) * static_cast<long long>(iy1 - iy0 + 1);
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BBox mask_to_bbox(const BinaryMask& m) {
  BBox box{m.width(), m.height(), -1, -1};
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      box.x_min = std::min(box.x_min, x);
      box.y_min = std::min(box.y_min, y);
      box.x_max = std::max(box.x_max, x);
      box.y_max = std::max(box.y_max, y);
    }
  }
  if (box.x_max < 0) fail(ErrorCode::kEmptyMask, "mask has no set pixels");
  return box;
}

BinaryMask filled_box(const BBox& box, int width, int height) {
  BinaryMask m(width, height);
  for (int y = std::max(box.y_min, 0); y <= std::min(box.y_max, height - 1); ++y) {
    for (int x = std::max(box.x_min, 0); x <= std::min(box.x_max, width - 1); ++x) {
      m.set(x, y);
    }
  }
  return m;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) out.set(x, y, a.get(x, y) || b.get(x, y));
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) out.set(x, y, a.get(x, y) && b.get(x, y));
  return out;
}

ComponentLabels label_components(const BinaryMask& m) {
  const int w = m.width();
  const int h = m.height();
  ComponentLabels result;
  result.labels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t seed = static_cast<std::size_t>(y0) * w + x0;
      if (!m.get(x0, y0) || result.labels[seed] != 0) continue;
      Component comp;
      comp.label = static_cast<int>(result.components.size()) + 1;
      comp.bounds = {x0, y0, x0, y0};
      result.labels[seed] = comp.label;
      stack.assign(1, {x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++comp.size;
        comp.bounds.x_min = std::min(comp.bounds.x_min, x);
        comp.bounds.x_max = std::max(comp.bounds.x_max, x);
        comp.bounds.y_min = std::min(comp.bounds.y_min, y);
        comp.bounds.y_max = std::max(comp.bounds.y_max, y);
        constexpr int kDx[4] = {1, -1, 0, 0};
        constexpr int kDy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + kDx[k];
          const int ny = y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m.get(nx, ny)) continue;
          const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
          if (result.labels[ni] != 0) continue;
          result.labels[ni] = comp.label;
          stack.emplace_back(nx, ny);
        }
      }
      result.components.push_back(comp);
    }
  }
  return result;
}

BinaryMask largest_component(const BinaryMask& m) {
  const ComponentLabels cl = label_components(m);
  BinaryMask out(m.width(), m.height());
  if (cl.components.empty()) return out;
  const Component* best = &cl.components.front();
  for (const Component& c : cl.components) {
    if (c.size > best->size ||
        (c.size == best->size &&
         std::pair(c.bounds.y_min, c.bounds.x_min) <
             std::pair(best->bounds.y_min, best->bounds.x_min))) {
      best = &c;
    }
  }
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (cl.labels[static_cast<std::size_t>(y) * m.width() + x] == best->label) {
        out.set(x, y);
      }
    }
  }
  return out;
}

}  // namespace garmentseg
