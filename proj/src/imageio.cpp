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

#include "clickseg/imageio.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace clickseg {

namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

RawImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw ImageDecodeError(std::string("png: ") + img.message);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  RawImage out;
  out.height = static_cast<int>(img.height);
  out.width = static_cast<int>(img.width);
  out.channels = color ? 3 : 1;
  out.data.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageDecodeError("png: " + msg);
  }
  return out;
}

// Binary PNM (P5 gray / P6 RGB), maxval <= 255.
RawImage decode_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto next_int = [&]() -> int {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw ImageDecodeError("pnm: malformed header");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1L << 24)) throw ImageDecodeError("pnm: header value too large");
    }
    return static_cast<int>(v);
  };
  RawImage out;
  out.channels = bytes[1] == '6' ? 3 : 1;
  out.width = next_int();
  out.height = next_int();
  const int maxval = next_int();
  if (maxval <= 0 || maxval > 255) {
    throw ImageDecodeError("pnm: only 8-bit maxval supported");
  }
  ++pos;  // single whitespace before the raster
  const std::size_t n =
      static_cast<std::size_t>(out.width) * out.height * out.channels;
  if (pos + n > bytes.size()) throw ImageDecodeError("pnm: truncated raster");
  out.data.assign(bytes.begin() + pos, bytes.begin() + pos + n);
  return out;
}

std::vector<std::uint8_t> encode_png_raw(const std::uint8_t* data, int height,
                                         int width, int channels) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(std::string("png encode: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, data, 0, nullptr)) {
    throw Error(std::string("png encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

RawImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes);
  }
  throw ImageDecodeError("unrecognized image format (expected PNG or binary PNM)");
}

RawImage read_raw_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file_bytes(path));
  } catch (const ImageDecodeError& e) {
    throw ImageDecodeError(path.string() + ": " + e.what());
  }
}

RgbImage to_rgb(const RawImage& raw) {
  if (raw.channels == 3) return RgbImage(raw.height, raw.width, raw.data);
  std::vector<std::uint8_t> rgb(raw.data.size() * 3);
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = raw.data[i];
  }
  return RgbImage(raw.height, raw.width, std::move(rgb));
}

BinaryMask to_mask(const RawImage& raw) {
  BinaryMask m(raw.height, raw.width);
  const int ch = raw.channels;
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool on = false;
    for (int k = 0; k < ch; ++k) on = on || raw.data[i * ch + k] != 0;
    m[i] = on ? 1 : 0;
  }
  return m;
}

RgbImage read_rgb(const std::filesystem::path& path) {
  return to_rgb(read_raw_image(path));
}

BinaryMask read_mask(const std::filesystem::path& path) {
  return to_mask(read_raw_image(path));
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return encode_png_raw(image.data().data(), image.height(), image.width(), 3);
}

std::vector<std::uint8_t> encode_png(const BinaryMask& mask) {
  std::vector<std::uint8_t> gray(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) gray[i] = mask[i] ? 255 : 0;
  return encode_png_raw(gray.data(), mask.height(), mask.width(), 1);
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_file_bytes(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file_bytes(path, encode_png(mask));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace clickseg
