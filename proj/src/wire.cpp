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

#include "clickseg/wire.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>

#include "json.hpp"

namespace clickseg {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "f32 planes are encoded assuming a little-endian host");

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  if (bytes.empty()) return out;
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.empty()) return {};
  if (text.size() % 4 != 0) throw ProtocolError("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ProtocolError("invalid base64 payload");
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  std::size_t size = static_cast<std::size_t>(n);
  if (text.ends_with("==")) {
    size -= 2;
  } else if (text.ends_with("=")) {
    size -= 1;
  }
  out.resize(size);
  return out;
}

std::string encode_f32_plane(const Grid<double>& plane) {
  std::vector<std::uint8_t> bytes(plane.size() * 4);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const float f = static_cast<float>(plane[i]);
    std::memcpy(bytes.data() + 4 * i, &f, 4);
  }
  return base64_encode(bytes);
}

Grid<double> decode_f32_plane(const std::string& b64, int height, int width) {
  const std::vector<std::uint8_t> bytes = base64_decode(b64);
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (bytes.size() != 4 * n) {
    throw ShapeError("float plane holds " + std::to_string(bytes.size() / 4) +
                     " values, expected " + std::to_string(n));
  }
  Grid<double> out(height, width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    float f;
    std::memcpy(&f, bytes.data() + 4 * i, 4);
    out[i] = f;
  }
  return out;
}

std::string encode_predict_request(const PredictorInput& input) {
  input.validate_shapes();
  Grid<double> prev(input.height(), input.width(), 0.0);
  for (std::size_t i = 0; i < prev.size(); ++i) prev[i] = input.prev_mask[i];
  json j;
  j["height"] = input.height();
  j["width"] = input.width();
  j["image"] = base64_encode(input.image->data());
  j["pos"] = encode_f32_plane(input.guidance.pos);
  j["neg"] = encode_f32_plane(input.guidance.neg);
  j["prev"] = encode_f32_plane(prev);
  return j.dump();
}

PredictorInput decode_predict_request(const std::string& body) {
  try {
    const json j = json::parse(body);
    const int h = j.at("height").get<int>();
    const int w = j.at("width").get<int>();
    if (h < 0 || w < 0) throw ProtocolError("negative dimensions");
    std::vector<std::uint8_t> rgb = base64_decode(j.at("image").get<std::string>());
    if (rgb.size() != static_cast<std::size_t>(h) * w * 3) {
      throw ProtocolError("image payload length does not match dimensions");
    }
    PredictorInput in;
    in.image = std::make_shared<const RgbImage>(h, w, std::move(rgb));
    in.guidance.pos = decode_f32_plane(j.at("pos").get<std::string>(), h, w);
    in.guidance.neg = decode_f32_plane(j.at("neg").get<std::string>(), h, w);
    const Grid<double> prev = decode_f32_plane(j.at("prev").get<std::string>(), h, w);
    in.prev_mask = BinaryMask(h, w);
    for (std::size_t i = 0; i < prev.size(); ++i) in.prev_mask[i] = prev[i] > 0.5;
    return in;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed predict request: ") + e.what());
  }
}

std::string encode_predict_response(const ProbMap& prob) {
  return json{{"prob", encode_f32_plane(prob)}}.dump();
}

ProbMap decode_predict_response(const std::string& body, int height, int width) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed predict response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("prob") || !j.at("prob").is_string()) {
    throw ProtocolError("predict response lacks a 'prob' string");
  }
  return ProbMap(decode_f32_plane(j.at("prob").get<std::string>(), height, width));
}

std::string rle_encode(const BinaryMask& mask) {
  std::string out;
  if (mask.empty()) return out;
  std::uint8_t current = 0;
  std::size_t run = 0;
  auto flush = [&] {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(run);
  };
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const std::uint8_t v = mask[i] ? 1 : 0;
    if (v != current) {
      flush();
      current = v;
      run = 0;
    }
    ++run;
  }
  flush();
  return out;
}

BinaryMask rle_decode(const std::string& rle, int height, int width) {
  BinaryMask out(height, width);
  const std::size_t total = out.size();
  std::size_t pos = 0;
  std::uint8_t value = 0;
  const char* p = rle.data();
  const char* end = rle.data() + rle.size();
  while (p < end) {
    std::size_t run = 0;
    auto [next, ec] = std::from_chars(p, end, run);
    if (ec != std::errc()) throw ProtocolError("malformed run-length string");
    if (pos + run > total) throw ProtocolError("run-length string overflows mask");
    std::fill(out.data().begin() + static_cast<std::ptrdiff_t>(pos),
              out.data().begin() + static_cast<std::ptrdiff_t>(pos + run), value);
    pos += run;
    value ^= 1;
    p = next;
    if (p < end) {
      if (*p != ' ') throw ProtocolError("malformed run-length string");
      ++p;
    }
  }
  if (pos != total) throw ProtocolError("run-length string does not cover mask");
  return out;
}

}  // namespace clickseg
