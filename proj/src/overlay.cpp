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
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "garmentseg/pipeline.hpp"

namespace garmentseg {

namespace {

// 3x5 glyphs, five rows of three bits, top row in the high bits.
constexpr std::uint16_t glyph(int r0, int r1, int r2, int r3, int r4) {
  return static_cast<std::uint16_t>((r0 << 12) | (r1 << 9) | (r2 << 6) | (r3 << 3) | r4);
}

constexpr std::uint16_t kLetters[26] = {
    glyph(2, 5, 7, 5, 5), glyph(6, 5, 6, 5, 6), glyph(3, 4, 4, 4, 3), glyph(6, 5, 5, 5, 6),
    glyph(7, 4, 6, 4, 7), glyph(7, 4, 6, 4, 4), glyph(3, 4, 5, 5, 3), glyph(5, 5, 7, 5, 5),
    glyph(7, 2, 2, 2, 7), glyph(1, 1, 1, 5, 2), glyph(5, 5, 6, 5, 5), glyph(4, 4, 4, 4, 7),
    glyph(5, 7, 7, 5, 5), glyph(6, 5, 5, 5, 5), glyph(2, 5, 5, 5, 2), glyph(6, 5, 6, 4, 4),
    glyph(2, 5, 5, 6, 3), glyph(6, 5, 6, 5, 5), glyph(3, 4, 2, 1, 6), glyph(7, 2, 2, 2, 2),
    glyph(5, 5, 5, 5, 7), glyph(5, 5, 5, 5, 2), glyph(5, 5, 7, 7, 5), glyph(5, 5, 2, 5, 5),
    glyph(5, 5, 2, 2, 2), glyph(7, 1, 2, 4, 7),
};

constexpr std::uint16_t kDigits[10] = {
    glyph(7, 5, 5, 5, 7), glyph(2, 6, 2, 2, 7), glyph(6, 1, 2, 4, 7), glyph(6, 1, 2, 1, 6),
    glyph(5, 5, 7, 1, 1), glyph(7, 4, 6, 1, 6), glyph(3, 4, 7, 5, 7), glyph(7, 1, 2, 2, 2),
    glyph(7, 5, 7, 5, 7), glyph(7, 5, 7, 1, 6),
};

std::uint16_t glyph_for(char ch) {
  const auto c = static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(ch)));
  if (c >= 'a' && c <= 'z') return kLetters[c - 'a'];
  if (c >= '0' && c <= '9') return kDigits[c - '0'];
  if (c == '.') return glyph(0, 0, 0, 0, 2);
  if (c == ':') return glyph(0, 2, 0, 2, 0);
  if (c == '-') return glyph(0, 0, 7, 0, 0);
  return 0;
}

void fill_rect(Image& img, int x0, int y0, int x1, int y1, Rgb c) {
  for (int y = std::max(0, y0); y <= std::min(img.height() - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(img.width() - 1, x1); ++x) img.set(x, y, c);
}

int text_width(const std::string& text, int scale) {
  return static_cast<int>(text.size()) * 4 * scale - scale;
}

// Text on a black plate.
void label(Image& img, int x, int y, const std::string& text, Rgb color, int scale) {
  fill_rect(img, x - 1, y - 1, x + text_width(text, scale), y + 5 * scale, {0, 0, 0});
  draw_text(img, x, y, text, color, scale);
}

std::string caption(const Detection& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", d.score);
  return std::string(to_string(d.cls)) + " " + buf;
}

}  // namespace

void draw_text(Image& img, int x, int y, const std::string& text, Rgb color, int scale) {
  int pen = x;
  for (char ch : text) {
    const std::uint16_t g = glyph_for(ch);
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (!((g >> ((4 - row) * 3 + (2 - col))) & 1)) continue;
        fill_rect(img, pen + col * scale, y + row * scale, pen + (col + 1) * scale - 1,
                  y + (row + 1) * scale - 1, color);
      }
    }
    pen += 4 * scale;
  }
}

Image render_overlay(const Image& img, const PipelineOutput& out, const OverlayOptions& options) {
  Image canvas = img;
  const double a = std::clamp(options.alpha, 0.0, 1.0);
  for (const Detection& d : out.garments) {
    if (d.mask.width() != img.width() || d.mask.height() != img.height()) continue;
    const Rgb tint = d.cls == GarmentClass::Top ? kTopColor : kBottomColor;
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (!d.mask.get(x, y)) continue;
        const Rgb p = canvas.at(x, y);
        auto mix = [a](std::uint8_t base, std::uint8_t over) {
          return static_cast<std::uint8_t>(std::lround((1.0 - a) * base + a * over));
        };
        canvas.set(x, y, {mix(p.r, tint.r), mix(p.g, tint.g), mix(p.b, tint.b)});
      }
    }
  }
  for (const Detection& d : out.garments) {
    if (d.mask.width() != img.width() || d.mask.height() != img.height()) continue;
    const Rgb tint = d.cls == GarmentClass::Top ? kTopColor : kBottomColor;
    const BBox& b = d.box;
    if (options.draw_boxes) {
      fill_rect(canvas, b.x_min, b.y_min, b.x_max, b.y_min, tint);
      fill_rect(canvas, b.x_min, b.y_max, b.x_max, b.y_max, tint);
      fill_rect(canvas, b.x_min, b.y_min, b.x_min, b.y_max, tint);
      fill_rect(canvas, b.x_max, b.y_min, b.x_max, b.y_max, tint);
    }
    if (options.draw_captions) {
      label(canvas, b.x_min + 1, std::max(1, b.y_min - 12), caption(d), tint, 2);
    }
  }
  if (options.watermark) {
    std::string mark = out.destroyed ? std::string("destroyed")
                                     : (out.route ? std::string(to_string(*out.route)) : "none");
    if (out.route) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %.2f", out.route_score);
      mark += buf;
    }
    label(canvas, 2, 2, mark, {255, 255, 255}, 1);
  }
  return canvas;
}

}  // namespace garmentseg
