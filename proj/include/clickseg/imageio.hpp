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

// PNG (via libpng) and binary PNM (P5/P6) reading and writing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "clickseg/core.hpp"

namespace clickseg {

class ImageDecodeError : public Error {
 public:
  using Error::Error;
};

/// Decoded 8-bit raster with 1 (gray) or 3 (RGB) channels. Alpha is dropped
/// and palettes are expanded.
struct RawImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

RawImage decode_image(std::span<const std::uint8_t> bytes);
RawImage read_raw_image(const std::filesystem::path& path);

/// Gray images are replicated across channels.
RgbImage to_rgb(const RawImage& raw);
/// Nonzero pixels become 1. Color inputs use any nonzero channel.
BinaryMask to_mask(const RawImage& raw);

RgbImage read_rgb(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RgbImage& image);
/// Mask pixels are written as 0 / 255.
std::vector<std::uint8_t> encode_png(const BinaryMask& mask);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const BinaryMask& mask);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace clickseg
