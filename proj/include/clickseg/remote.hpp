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

#pragma once

#include <chrono>
#include <string>

#include "clickseg/predictor.hpp"

namespace clickseg {

/// Connection failure, timeout or non-200 status from a remote predictor. The
/// message names the endpoint and the elapsed time.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Forwards every prediction to an HTTP endpoint speaking the JSON/base64
/// protocol in wire.hpp (POST {endpoint}/predict).
class RemotePredictor final : public Predictor {
 public:
  explicit RemotePredictor(std::string endpoint,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));
  std::string name() const override { return "remote:" + endpoint_; }
  const std::string& endpoint() const { return endpoint_; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  std::string endpoint_;  // scheme://host:port, no trailing slash
  std::chrono::milliseconds timeout_;
};

ProbMap remote_predict(const std::string& endpoint, const PredictorInput& input,
                       std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace clickseg
