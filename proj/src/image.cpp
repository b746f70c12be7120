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
#include "garmentseg/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "garmentseg/error.hpp"
#include "garmentseg/geometry.hpp"

namespace garmentseg {

namespace {

void ensure_parent(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
}

}  // namespace

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be non-negative");
  }
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Image load_image(const std::filesystem::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kDecodeFailure,
         "cannot decode image " + path.string() + ": " + e.what());
  }
  if (bgr.empty()) {
    fail(ErrorCode::kDecodeFailure, "cannot decode image " + path.string());
  }
  Image img(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.set(x, y, {row[x][2], row[x][1], row[x][0]});
    }
  }
  return img;
}

void save_image(const std::filesystem::path& path, const Image& image) {
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "cannot write an empty image");
  ensure_parent(path);
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb c = image.at(x, y);
      row[x] = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kIoFailure,
         "cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) fail(ErrorCode::kIoFailure, "cannot write image " + path.string());
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& m) {
  if (m.width() == 0 || m.height() == 0) {
    fail(ErrorCode::kInvalidArgument, "cannot write a zero-sized mask");
  }
  ensure_parent(path);
  cv::Mat gray(m.height(), m.width(), CV_8UC1);
  for (int y = 0; y < m.height(); ++y) {
    auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.width(); ++x) row[x] = m.get(x, y) ? 255 : 0;
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), gray);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kIoFailure,
         "cannot write mask " + path.string() + ": " + e.what());
  }
  if (!ok) fail(ErrorCode::kIoFailure, "cannot write mask " + path.string());
}

BinaryMask load_mask_png(const std::filesystem::path& path) {
  cv::Mat gray;
  try {
    gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  } catch (const cv::Exception& e) {
    fail(ErrorCode::kDecodeFailure,
         "cannot decode mask " + path.string() + ": " + e.what());
  }
  if (gray.empty()) {
    fail(ErrorCode::kDecodeFailure, "cannot decode mask " + path.string());
  }
  BinaryMask m(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) {
      if (row[x] != 0) m.set(x, y);
    }
  }
  return m;
}

}  // namespace garmentseg
