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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "garmentseg/geometry.hpp"

namespace garmentseg {

enum class GarmentClass { Top, Bottom };

inline constexpr std::array<GarmentClass, 2> kGarmentClasses = {
    GarmentClass::Top, GarmentClass::Bottom};

// "top" / "bottom".
std::string_view to_string(GarmentClass c);
// Case-insensitive, accepts the aliases in the label table ("tops", ...).
std::optional<GarmentClass> parse_garment_class(std::string_view label);

struct PolygonAnnotation {
  GarmentClass label = GarmentClass::Top;
  std::vector<Point> vertices;

  friend bool operator==(const PolygonAnnotation&, const PolygonAnnotation&) = default;
};

BinaryMask rasterize(const PolygonAnnotation& poly, int width, int height);

struct ImageDims {
  int width = 0;
  int height = 0;
};

// At most one annotation per garment class.
struct AnnotatedImage {
  std::string image_id;
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<PolygonAnnotation> annotations;

  const PolygonAnnotation* find(GarmentClass c) const;

  friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

// Pairwise disjoint id sets.
struct DatasetSplit {
  std::set<std::string> train;
  std::set<std::string> validation;
  std::set<std::string> test;

  // "train", "validation", "test" or "unassigned".
  std::string_view membership(const std::string& id) const;
  std::size_t size() const { return train.size() + validation.size() + test.size(); }

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

// Parses one LabelMe document. Vertices are clamped into
// [0, width] x [0, height]. Throws kMalformedDocument, kUnknownLabel,
// kDegeneratePolygon, kDuplicateClass.
AnnotatedImage parse_labelme(std::string_view json_text, ImageDims dims,
                             std::string image_id = {},
                             std::string image_path = {});

// Reads "imageWidth"/"imageHeight" when present.
std::optional<ImageDims> labelme_declared_dims(std::string_view json_text);
// The document's "imagePath" field, if any.
std::optional<std::string> labelme_image_path(std::string_view json_text);

// Shuffles ids with a seeded generator and cuts floor-sized validation and
// test slices; the remainder goes to train. Throws kBadFractions,
// kDuplicateIds, kEmptyInput.
DatasetSplit make_split(std::span<const std::string> image_ids,
                        SplitFractions fractions, std::uint64_t seed);

struct Manifest {
  std::vector<AnnotatedImage> images;
  DatasetSplit split;

  std::vector<const AnnotatedImage*> in_split(std::string_view name) const;
};

// Serialised manifest text (UTF-8 JSON). Throws kUnknownId, kDuplicateIds.
std::string manifest_to_json(std::span<const AnnotatedImage> images,
                             const DatasetSplit& split);
// Throws kManifestError.
Manifest parse_manifest(std::string_view json_text);
Manifest load_manifest(const std::filesystem::path& path);

// Writes <out_dir>/manifest.json and returns its path. Throws kUnknownId,
// kIoFailure.
std::filesystem::path export_dataset(std::span<const AnnotatedImage> images,
                                     const DatasetSplit& split,
                                     const std::filesystem::path& out_dir);

// Relative image paths in a manifest are resolved against its directory.
std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_dir,
                                         const std::string& image_path);

}  // namespace garmentseg
