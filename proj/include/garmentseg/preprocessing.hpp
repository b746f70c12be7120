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

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "garmentseg/geometry.hpp"
#include "garmentseg/image.hpp"

namespace garmentseg {

// Person/garment foreground segmentation service. Implementations must
// return a mask with the input image's dimensions.
class ForegroundBackend {
 public:
  virtual ~ForegroundBackend() = default;
  virtual std::string name() const = 0;
  virtual BinaryMask segment(const Image& img) const = 0;
  // False means callers must not invoke segment() from several threads at
  // once.
  virtual bool concurrent_safe() const { return true; }
};

// mock:all-ones
class AllOnesForeground final : public ForegroundBackend {
 public:
  std::string name() const override { return "mock:all-ones"; }
  BinaryMask segment(const Image& img) const override;
};

// mock:all-zeros
class AllZerosForeground final : public ForegroundBackend {
 public:
  std::string name() const override { return "mock:all-zeros"; }
  BinaryMask segment(const Image& img) const override;
};

// mock:centered-rectangle[:<fraction>] -- a rectangle covering `fraction`
// of each side, centred.
class CenteredRectangleForeground final : public ForegroundBackend {
 public:
  explicit CenteredRectangleForeground(double fraction = 0.5);
  std::string name() const override;
  BinaryMask segment(const Image& img) const override;
  BBox rectangle(int width, int height) const;

 private:
  double fraction_;
};

// mock:from-file:<png>
class MaskFileForeground final : public ForegroundBackend {
 public:
  explicit MaskFileForeground(std::filesystem::path path);
  std::string name() const override { return "mock:from-file:" + path_.string(); }
  BinaryMask segment(const Image& img) const override;

 private:
  std::filesystem::path path_;
  BinaryMask mask_;
};

// color-threshold[:<distance>] -- pixels whose RGB distance from the median
// border colour exceeds `distance`. Works for studio shots on plain
// backgrounds.
class ColorThresholdForeground final : public ForegroundBackend {
 public:
  explicit ColorThresholdForeground(double distance = 40.0) : distance_(distance) {}
  std::string name() const override;
  BinaryMask segment(const Image& img) const override;

 private:
  double distance_;
};

// Throws kBackendUnavailable for unknown names.
std::shared_ptr<const ForegroundBackend> make_foreground_backend(const std::string& spec);

struct PreprocessOptions {
  double tau = 0.02;
  Rgb fill{255, 255, 255};
};

struct PreprocessResult {
  Image cleaned_image;
  BinaryMask foreground_mask;
  bool destroyed = false;
  double foreground_fraction = 0.0;
};

// Background removal, largest-component cleanup and the destroyed-image
// check. Throws kBackendFailure (naming the backend), kDimensionMismatch,
// kInvalidArgument.
PreprocessResult preprocess(const Image& img, const ForegroundBackend& backend,
                            const PreprocessOptions& options = {});

struct DestroyedPartition {
  std::vector<std::pair<std::string, PreprocessResult>> kept;
  std::vector<std::pair<std::string, PreprocessResult>> discarded;
};

DestroyedPartition filter_destroyed(
    std::vector<std::pair<std::string, PreprocessResult>> results);

}  // namespace garmentseg
