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
#include "garmentseg/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "garmentseg/error.hpp"
#include "rng.hpp"

namespace garmentseg {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kUnassigned = "unassigned";

struct LabelAlias {
  std::string_view text;
  GarmentClass cls;
};

constexpr LabelAlias kLabelAliases[] = {
    {"top", GarmentClass::Top},
    {"tops", GarmentClass::Top},
    {"bottom", GarmentClass::Bottom},
    {"bottoms", GarmentClass::Bottom},
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

json parse_json(std::string_view text, ErrorCode code, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(code, std::string(what) + " is not valid JSON: " + e.what());
  }
}

double number_or_fail(const json& v, ErrorCode code, std::string_view what) {
  if (!v.is_number()) fail(code, std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(code, std::string(what) + " must be finite");
  return d;
}

}  // namespace

std::string_view to_string(GarmentClass c) {
  return c == GarmentClass::Top ? "top" : "bottom";
}

std::optional<GarmentClass> parse_garment_class(std::string_view label) {
  std::string key = lowercase(label);
  key.erase(key.begin(), std::find_if(key.begin(), key.end(),
                                      [](unsigned char c) { return !std::isspace(c); }));
  key.erase(std::find_if(key.rbegin(), key.rend(),
                         [](unsigned char c) { return !std::isspace(c); })
                .base(),
            key.end());
  for (const LabelAlias& alias : kLabelAliases) {
    if (alias.text == key) return alias.cls;
  }
  return std::nullopt;
}

BinaryMask rasterize(const PolygonAnnotation& poly, int width, int height) {
  return rasterize(std::span<const Point>(poly.vertices), width, height);
}

const PolygonAnnotation* AnnotatedImage::find(GarmentClass c) const {
  for (const PolygonAnnotation& a : annotations) {
    if (a.label == c) return &a;
  }
  return nullptr;
}

std::string_view DatasetSplit::membership(const std::string& id) const {
  if (train.contains(id)) return "train";
  if (validation.contains(id)) return "validation";
  if (test.contains(id)) return "test";
  return kUnassigned;
}

std::vector<const AnnotatedImage*> Manifest::in_split(std::string_view name) const {
  std::vector<const AnnotatedImage*> out;
  for (const AnnotatedImage& img : images) {
    if (name.empty() || split.membership(img.image_id) == name) out.push_back(&img);
  }
  return out;
}

AnnotatedImage parse_labelme(std::string_view json_text, ImageDims dims,
                             std::string image_id, std::string image_path) {
  if (dims.width <= 0 || dims.height <= 0) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  const json doc = parse_json(json_text, ErrorCode::kMalformedDocument, "LabelMe document");
  if (!doc.is_object() || !doc.contains("shapes") || !doc["shapes"].is_array()) {
    fail(ErrorCode::kMalformedDocument, "LabelMe document needs a \"shapes\" array");
  }

  AnnotatedImage out;
  out.image_id = std::move(image_id);
  out.image_path = std::move(image_path);
  out.width = dims.width;
  out.height = dims.height;

  std::size_t index = 0;
  for (const json& shape : doc["shapes"]) {
    const std::string where = "shape " + std::to_string(index++);
    if (!shape.is_object() || !shape.contains("label") || !shape["label"].is_string() ||
        !shape.contains("points") || !shape["points"].is_array()) {
      fail(ErrorCode::kMalformedDocument, where + " needs \"label\" and \"points\"");
    }
    if (shape.contains("shape_type") && !shape["shape_type"].is_null() &&
        shape["shape_type"] != "polygon") {
      fail(ErrorCode::kMalformedDocument, where + " is not a polygon");
    }
    const std::string label = shape["label"].get<std::string>();
    const std::optional<GarmentClass> cls = parse_garment_class(label);
    if (!cls) fail(ErrorCode::kUnknownLabel, where + " has unknown label \"" + label + "\"");

    PolygonAnnotation poly;
    poly.label = *cls;
    for (const json& pt : shape["points"]) {
      if (!pt.is_array() || pt.size() != 2) {
        fail(ErrorCode::kMalformedDocument, where + " has a point that is not [x, y]");
      }
      const double x = number_or_fail(pt[0], ErrorCode::kMalformedDocument, where + " x");
      const double y = number_or_fail(pt[1], ErrorCode::kMalformedDocument, where + " y");
      poly.vertices.push_back({std::clamp(x, 0.0, static_cast<double>(dims.width)),
                               std::clamp(y, 0.0, static_cast<double>(dims.height))});
    }
    if (poly.vertices.size() < 3) {
      fail(ErrorCode::kDegeneratePolygon, where + " has fewer than 3 points");
    }
    if (polygon_area(poly.vertices) == 0.0) {
      fail(ErrorCode::kDegeneratePolygon, where + " has zero area");
    }
    if (out.find(poly.label)) {
      fail(ErrorCode::kDuplicateClass,
           where + " repeats class \"" + std::string(to_string(poly.label)) + "\"");
    }
    out.annotations.push_back(std::move(poly));
  }
  return out;
}

std::optional<ImageDims> labelme_declared_dims(std::string_view json_text) {
  const json doc = parse_json(json_text, ErrorCode::kMalformedDocument, "LabelMe document");
  if (!doc.is_object()) return std::nullopt;
  const auto w = doc.find("imageWidth");
  const auto h = doc.find("imageHeight");
  if (w == doc.end() || h == doc.end() || !w->is_number_integer() ||
      !h->is_number_integer()) {
    return std::nullopt;
  }
  return ImageDims{w->get<int>(), h->get<int>()};
}

std::optional<std::string> labelme_image_path(std::string_view json_text) {
  const json doc = parse_json(json_text, ErrorCode::kMalformedDocument, "LabelMe document");
  if (!doc.is_object()) return std::nullopt;
  const auto p = doc.find("imagePath");
  if (p == doc.end() || !p->is_string()) return std::nullopt;
  return p->get<std::string>();
}

DatasetSplit make_split(std::span<const std::string> image_ids,
                        SplitFractions fractions, std::uint64_t seed) {
  if (image_ids.empty()) fail(ErrorCode::kEmptyInput, "no image ids to split");
  const double parts[3] = {fractions.train, fractions.validation, fractions.test};
  for (double f : parts) {
    if (!std::isfinite(f) || f < 0.0) {
      fail(ErrorCode::kBadFractions, "split fractions must be non-negative");
    }
  }
  if (std::abs(parts[0] + parts[1] + parts[2] - 1.0) > 1e-9) {
    fail(ErrorCode::kBadFractions, "split fractions must sum to 1");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& id : image_ids) {
    if (!seen.insert(id).second) fail(ErrorCode::kDuplicateIds, "duplicate image id \"" + id + "\"");
  }

  // n * f is evaluated in floating point; nudge so that products that are
  // mathematically integral (320 * 0.15) are not floored one short.
  const auto n = static_cast<double>(image_ids.size());
  const auto floor_count = [n](double f) {
    return static_cast<std::size_t>(std::floor(n * f + 1e-9));
  };
  const std::size_t n_val = floor_count(fractions.validation);
  const std::size_t n_test = floor_count(fractions.test);
  const std::size_t n_train = image_ids.size() - n_val - n_test;

  std::vector<std::string> order(image_ids.begin(), image_ids.end());
  detail::Rng rng(seed);
  rng.shuffle(order);

  DatasetSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < n_train) {
      split.train.insert(order[i]);
    } else if (i < n_train + n_val) {
      split.validation.insert(order[i]);
    } else {
      split.test.insert(order[i]);
    }
  }
  return split;
}

std::string manifest_to_json(std::span<const AnnotatedImage> images,
                             const DatasetSplit& split) {
  std::unordered_set<std::string> ids;
  for (const AnnotatedImage& img : images) {
    if (!ids.insert(img.image_id).second) {
      fail(ErrorCode::kDuplicateIds, "duplicate image id \"" + img.image_id + "\"");
    }
  }
  for (const auto* set : {&split.train, &split.validation, &split.test}) {
    for (const std::string& id : *set) {
      if (!ids.contains(id)) fail(ErrorCode::kUnknownId, "split names unknown image \"" + id + "\"");
    }
  }

  ordered_json records = ordered_json::array();
  for (const AnnotatedImage& img : images) {
    ordered_json anns = ordered_json::array();
    for (const PolygonAnnotation& a : img.annotations) {
      ordered_json verts = ordered_json::array();
      for (const Point& p : a.vertices) verts.push_back({p.x, p.y});
      anns.push_back({{"class", to_string(a.label)}, {"vertices", std::move(verts)}});
    }
    records.push_back({{"id", img.image_id},
                       {"path", img.image_path},
                       {"width", img.width},
                       {"height", img.height},
                       {"split", split.membership(img.image_id)},
                       {"annotations", std::move(anns)}});
  }
  ordered_json doc;
  doc["images"] = std::move(records);
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view json_text) {
  const json doc = parse_json(json_text, ErrorCode::kManifestError, "manifest");
  if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
    fail(ErrorCode::kManifestError, "manifest needs an \"images\" array");
  }
  Manifest m;
  std::unordered_set<std::string> ids;
  for (const json& rec : doc["images"]) {
    try {
      AnnotatedImage img;
      img.image_id = rec.at("id").get<std::string>();
      img.image_path = rec.at("path").get<std::string>();
      img.width = rec.at("width").get<int>();
      img.height = rec.at("height").get<int>();
      if (img.width <= 0 || img.height <= 0) {
        fail(ErrorCode::kManifestError, "image \"" + img.image_id + "\" has non-positive size");
      }
      if (!ids.insert(img.image_id).second) {
        fail(ErrorCode::kManifestError, "duplicate image id \"" + img.image_id + "\"");
      }
      const std::string tag = rec.value("split", std::string(kUnassigned));
      if (tag == "train") {
        m.split.train.insert(img.image_id);
      } else if (tag == "validation" || tag == "val") {
        m.split.validation.insert(img.image_id);
      } else if (tag == "test") {
        m.split.test.insert(img.image_id);
      } else if (tag != kUnassigned) {
        fail(ErrorCode::kManifestError, "unknown split tag \"" + tag + "\"");
      }
      for (const json& a : rec.at("annotations")) {
        PolygonAnnotation poly;
        const std::string cls = a.at("class").get<std::string>();
        const auto parsed = parse_garment_class(cls);
        if (!parsed) fail(ErrorCode::kManifestError, "unknown class \"" + cls + "\"");
        poly.label = *parsed;
        for (const json& v : a.at("vertices")) {
          poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        if (poly.vertices.size() < 3 || img.find(poly.label)) {
          fail(ErrorCode::kManifestError,
               "invalid annotation on image \"" + img.image_id + "\"");
        }
        img.annotations.push_back(std::move(poly));
      }
      m.images.push_back(std::move(img));
    } catch (const json::exception& e) {
      fail(ErrorCode::kManifestError, std::string("malformed manifest record: ") + e.what());
    }
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kManifestError, "cannot read manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::filesystem::path export_dataset(std::span<const AnnotatedImage> images,
                                     const DatasetSplit& split,
                                     const std::filesystem::path& out_dir) {
  const std::string text = manifest_to_json(images, split);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + out_dir.string() + ": " + ec.message());
  const std::filesystem::path path = out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  return path;
}

std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_dir,
                                         const std::string& image_path) {
  const std::filesystem::path p(image_path);
  return p.is_absolute() ? p : manifest_dir / p;
}

}  // namespace garmentseg
