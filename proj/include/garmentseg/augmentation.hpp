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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "garmentseg/annotations.hpp"
#include "garmentseg/geometry.hpp"
#include "garmentseg/image.hpp"

namespace garmentseg {

// Counter-clockwise on screen about the image centre. With expand_canvas the
// output is just large enough to hold the whole rotated frame.
struct Rotate {
  double degrees = 45.0;
  bool expand_canvas = true;
};

struct FlipHorizontal {};

// Gaussian low-pass: kernel half-width ceil(radius), sigma = radius / 2.
struct Blur {
  double radius = 1.0;
};

// Additive Gaussian noise per channel, clipped to [0, 255].
struct AddNoise {
  double sigma = 8.0;
  std::uint64_t seed = 0;
};

using AugmentOp = std::variant<Rotate, FlipHorizontal, Blur, AddNoise>;

// Throws kInvalidArgument when an op's parameters are out of range.
void validate(const AugmentOp& op);
bool is_geometric(const AugmentOp& op);
std::string describe(const AugmentOp& op);

// Canvas size after applying op to an image of the given size.
ImageDims output_dims(const AugmentOp& op, ImageDims dims);

// Maps a point of the source canvas into the output canvas.
Point transform_point(const AugmentOp& op, Point p, ImageDims dims);

// Bilinear resampling for rotations; pixels with no source are black.
Image apply_to_image(const AugmentOp& op, const Image& img);
// Nearest-neighbour resampling; photometric ops are the identity.
BinaryMask apply_to_mask(const AugmentOp& op, const BinaryMask& mask);
// Photometric ops are the identity. The label is preserved.
PolygonAnnotation apply_to_polygon(const AugmentOp& op, const PolygonAnnotation& poly,
                                   ImageDims dims);

struct Sample {
  AnnotatedImage annotations;
  Image image;
};

// Applies ops in order to the image and every polygon. Polygons are clipped
// to the output canvas; any that vanish are dropped.
Sample augment_sample(std::span<const AugmentOp> ops, Sample sample);

}  // namespace garmentseg
