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

#include "clickseg/remote.hpp"

#include <sstream>

#include "clickseg/wire.hpp"
#include "httplib.h"

namespace clickseg {

namespace {

std::string strip_slash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

}  // namespace

RemotePredictor::RemotePredictor(std::string endpoint,
                                 std::chrono::milliseconds timeout)
    : endpoint_(strip_slash(std::move(endpoint))), timeout_(timeout) {
  if (endpoint_.empty()) throw PreconditionError("remote predictor needs an endpoint");
  if (endpoint_.find("://") == std::string::npos) endpoint_ = "http://" + endpoint_;
}

ProbMap RemotePredictor::run(const PredictorInput& input) const {
  return remote_predict(endpoint_, input, timeout_);
}

ProbMap remote_predict(const std::string& endpoint, const PredictorInput& input,
                       std::chrono::milliseconds timeout) {
  const std::string base = strip_slash(endpoint);
  httplib::Client client(base);
  const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usec =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - sec);
  client.set_connection_timeout(sec.count(), usec.count());
  client.set_read_timeout(sec.count(), usec.count());
  client.set_write_timeout(sec.count(), usec.count());

  const std::string body = encode_predict_request(input);
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post("/predict", body, "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "remote predictor " << base << "/predict: " << what << " after "
        << elapsed.count() << " ms";
    return TransportError(msg.str());
  };
  if (!res) throw fail(httplib::to_string(res.error()));
  if (res->status != 200) throw fail("HTTP status " + std::to_string(res->status));
  try {
    return decode_predict_response(res->body, input.height(), input.width());
  } catch (const ShapeError& e) {
    throw ShapeError("remote predictor " + base + " response: " + e.what());
  }
}

}  // namespace clickseg
