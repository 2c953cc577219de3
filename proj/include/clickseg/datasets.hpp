// Copyright 2026 The clickseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Instance datasets on disk (index.json), the synthetic suites and the
// two-source merge.
//
// index.json:
//   {"images":    [{"id", "file", "height", "width"}],
//    "instances": [{"id", "image_id", "source": "general" | "fine",
//                   "mask_file"? | "polygon"?: [[x, y], ...], "category"?}]}
//
// Paths are relative to the directory holding index.json. Mask files are
// single-channel 8-bit PNG or PGM images where nonzero marks the instance.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clickseg/core.hpp"
#include "clickseg/imageproc.hpp"

namespace clickseg {

enum class SourceTag { kGeneral, kFine };

const char* to_string(SourceTag tag);
SourceTag parse_source_tag(const std::string& s);

struct ImageEntry {
  std::string id;
  std::filesystem::path file;  // absolute once loaded
  int height = 0;
  int width = 0;
  ImagePtr pixels;  // may be null for in-memory suites built without pixels
};

struct InstanceRecord {
  std::string instance_id;
  std::string image_id;
  ImagePtr image;
  BinaryMask mask;
  SourceTag source = SourceTag::kGeneral;
  std::optional<std::string> category;
};

/// Raised for malformed indexes and invalid instances; the message names the
/// offending instance or image.
class DatasetError : public Error {
 public:
  using Error::Error;
};

struct Dataset {
  std::vector<ImageEntry> images;         // sorted by id
  std::vector<InstanceRecord> instances;  // sorted by instance_id

  bool empty() const { return instances.empty(); }
  std::size_t size() const { return instances.size(); }
  const ImageEntry* find_image(const std::string& id) const;
};

/// Loads dir/index.json, decoding images and masks and rasterizing polygons.
Dataset load_dataset(const std::filesystem::path& dir);

/// Writes `ds` as dir/index.json with images/ and masks/ PNG files.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

struct MergeConfig {
  double iou_threshold = 0.80;
  void validate() const;
};

/// Keeps every fine record, plus each general record that no fine record on
/// the same image overlaps with IoU strictly above the threshold. Output is
/// sorted by instance_id.
std::vector<InstanceRecord> merge_sources(
    const std::vector<InstanceRecord>& general,
    const std::vector<InstanceRecord>& fine, const MergeConfig& cfg = {});

/// Dataset-level merge: records from `general` and `fine` are used with their
/// roles regardless of stored tags; images are unioned by id.
Dataset merge_datasets(const Dataset& general, const Dataset& fine,
                       const MergeConfig& cfg = {});

/// Combines all instances of each image into a single foreground mask
/// (DAVIS-style preparation). Instance ids become the image ids.
Dataset union_instances_per_image(const Dataset& ds);

enum class SuiteKind { kTwoColorShapes, kTexturedShapes };

SuiteKind parse_suite_kind(const std::string& s);
const char* to_string(SuiteKind kind);

struct SuiteOptions {
  int height = 96;
  int width = 96;
  double noise_sigma = 5.0 / 255.0;
};

/// n single-instance images of random star-convex blobs. Deterministic per
/// seed.
Dataset make_synthetic_suite(SuiteKind kind, int n, std::uint64_t seed,
                             const SuiteOptions& opts = {});

}  // namespace clickseg
