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

// Wire formats shared by the remote predictor, the session service and the
// CLI.
//
// Remote predictor (POST /predict, application/json):
//   request  {"height": H, "width": W,
//             "image": b64(H*W*3 bytes, row-major RGB),
//             "pos":   b64(H*W little-endian float32),
//             "neg":   b64(H*W little-endian float32),
//             "prev":  b64(H*W little-endian float32)}
//   response {"prob":  b64(H*W little-endian float32)}
//
// Mask run-length string: decimal run lengths separated by single spaces,
// row-major, alternating zero-runs and one-runs and always starting with a
// zero-run (which may be 0). The runs sum to H*W. An all-zero 2x2 mask is
// "4", an all-one 2x2 mask is "0 4", and a 0x0 mask is "".

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clickseg/core.hpp"
#include "clickseg/predictor.hpp"

namespace clickseg {

/// Malformed payload or a response that does not match the request.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

std::string encode_f32_plane(const Grid<double>& plane);
Grid<double> decode_f32_plane(const std::string& b64, int height, int width);

std::string encode_predict_request(const PredictorInput& input);

/// Server-side decoding. Clicks are not carried on the wire, so the result
/// has an empty click list; prev is binarized at 0.5.
PredictorInput decode_predict_request(const std::string& body);

std::string encode_predict_response(const ProbMap& prob);
ProbMap decode_predict_response(const std::string& body, int height, int width);

std::string rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const std::string& rle, int height, int width);

}  // namespace clickseg
