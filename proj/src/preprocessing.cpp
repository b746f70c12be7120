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
#include "garmentseg/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "garmentseg/error.hpp"

namespace garmentseg {

namespace {

double parse_number(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kBackendUnavailable, "bad parameter in backend spec \"" + spec + "\"");
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

BinaryMask AllOnesForeground::segment(const Image& img) const {
  BinaryMask m(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) m.set(x, y);
  return m;
}

BinaryMask AllZerosForeground::segment(const Image& img) const {
  return BinaryMask(img.width(), img.height());
}

CenteredRectangleForeground::CenteredRectangleForeground(double fraction)
    : fraction_(fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "rectangle fraction must be in (0, 1]");
  }
}

std::string CenteredRectangleForeground::name() const {
  return "mock:centered-rectangle:" + format_number(fraction_);
}

BBox CenteredRectangleForeground::rectangle(int width, int height) const {
  const int w = std::max(1, static_cast<int>(std::lround(width * fraction_)));
  const int h = std::max(1, static_cast<int>(std::lround(height * fraction_)));
  const int x0 = (width - w) / 2;
  const int y0 = (height - h) / 2;
  return {x0, y0, x0 + w - 1, y0 + h - 1};
}

BinaryMask CenteredRectangleForeground::segment(const Image& img) const {
  if (img.empty()) return BinaryMask(img.width(), img.height());
  return filled_box(rectangle(img.width(), img.height()), img.width(), img.height());
}

MaskFileForeground::MaskFileForeground(std::filesystem::path path)
    : path_(std::move(path)), mask_(load_mask_png(path_)) {}

BinaryMask MaskFileForeground::segment(const Image&) const { return mask_; }

std::string ColorThresholdForeground::name() const {
  return "color-threshold:" + format_number(distance_);
}

BinaryMask ColorThresholdForeground::segment(const Image& img) const {
  BinaryMask m(img.width(), img.height());
  if (img.empty()) return m;
  std::vector<std::uint8_t> border[3];
  auto sample = [&](int x, int y) {
    const Rgb c = img.at(x, y);
    border[0].push_back(c.r);
    border[1].push_back(c.g);
    border[2].push_back(c.b);
  };
  for (int x = 0; x < img.width(); ++x) {
    sample(x, 0);
    sample(x, img.height() - 1);
  }
  for (int y = 0; y < img.height(); ++y) {
    sample(0, y);
    sample(img.width() - 1, y);
  }
  double bg[3];
  for (int c = 0; c < 3; ++c) {
    auto& v = border[c];
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    bg[c] = v[v.size() / 2];
  }
  const double limit = distance_ * distance_;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img.at(x, y);
      const double dr = p.r - bg[0];
      const double dg = p.g - bg[1];
      const double db = p.b - bg[2];
      if (dr * dr + dg * dg + db * db > limit) m.set(x, y);
    }
  }
  return m;
}

std::shared_ptr<const ForegroundBackend> make_foreground_backend(const std::string& spec) {
  if (spec == "mock:all-ones") return std::make_shared<AllOnesForeground>();
  if (spec == "mock:all-zeros") return std::make_shared<AllZerosForeground>();
  if (spec == "mock:centered-rectangle") return std::make_shared<CenteredRectangleForeground>();
  const std::string rect = "mock:centered-rectangle:";
  if (spec.starts_with(rect)) {
    return std::make_shared<CenteredRectangleForeground>(
        parse_number(spec.substr(rect.size()), spec));
  }
  const std::string file = "mock:from-file:";
  if (spec.starts_with(file)) {
    try {
      return std::make_shared<MaskFileForeground>(spec.substr(file.size()));
    } catch (const Error& e) {
      fail(ErrorCode::kBackendUnavailable, "backend \"" + spec + "\": " + e.what());
    }
  }
  if (spec == "color-threshold") return std::make_shared<ColorThresholdForeground>();
  const std::string thr = "color-threshold:";
  if (spec.starts_with(thr)) {
    return std::make_shared<ColorThresholdForeground>(parse_number(spec.substr(thr.size()), spec));
  }
  fail(ErrorCode::kBackendUnavailable, "unknown foreground backend \"" + spec + "\"");
}

PreprocessResult preprocess(const Image& img, const ForegroundBackend& backend,
                            const PreprocessOptions& options) {
  if (img.empty()) fail(ErrorCode::kInvalidArgument, "cannot preprocess an empty image");
  if (!(options.tau > 0.0 && options.tau < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "tau must be in (0, 1)");
  }

  BinaryMask raw;
  try {
    raw = backend.segment(img);
  } catch (const std::exception& e) {
    fail(ErrorCode::kBackendFailure,
         "foreground backend \"" + backend.name() + "\" failed: " + e.what());
  }
  if (raw.width() != img.width() || raw.height() != img.height()) {
    fail(ErrorCode::kDimensionMismatch,
         "foreground backend \"" + backend.name() + "\" returned a " +
             std::to_string(raw.width()) + "x" + std::to_string(raw.height()) +
             " mask for a " + std::to_string(img.width()) + "x" +
             std::to_string(img.height()) + " image");
  }

  PreprocessResult result;
  result.foreground_mask = largest_component(raw);
  result.foreground_fraction = static_cast<double>(result.foreground_mask.count()) /
                               static_cast<double>(img.pixel_count());
  result.destroyed = result.foreground_fraction < options.tau;
  result.cleaned_image = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!result.foreground_mask.get(x, y)) result.cleaned_image.set(x, y, options.fill);
    }
  }
  return result;
}

DestroyedPartition filter_destroyed(
    std::vector<std::pair<std::string, PreprocessResult>> results) {
  DestroyedPartition out;
  for (auto& entry : results) {
    (entry.second.destroyed ? out.discarded : out.kept).push_back(std::move(entry));
  }
  return out;
}

}  // namespace garmentseg
