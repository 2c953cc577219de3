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

// HTTP session service for interactive annotation.
//
//   POST /sessions                 multipart: image, mask?, gt?; ?predictor=
//                                  -> {session_id, height, width}
//   POST /sessions/{id}/clicks     {row, col, polarity} -> {mask, iou?}
//   POST /sessions/{id}/undo       -> {mask}
//   GET  /sessions/{id}/state      -> {clicks, mask, dims, predictor}
//
// Masks travel as run-length strings (see wire.hpp). Every click recomputes
// the prediction from the full click history plus the session's current
// mask, so predictor backends can change between calls. Mutations are
// serialized per session and leave the session untouched when they fail.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "clickseg/encoding.hpp"
#include "clickseg/predictor.hpp"
#include "clickseg/session.hpp"

namespace httplib {
class Server;
}

namespace clickseg {

/// Unknown or unusable predictor spec (HTTP 422).
class UnknownPredictorError : public Error {
 public:
  using Error::Error;
};

/// Resolves predictor specs such as "geodesic", "oracle",
/// "featherweight:model.json" or "remote:http://host:port".
class PredictorRegistry {
 public:
  /// `arg` is the text after the first ':' (empty if none); `gt` is the
  /// session's ground truth when one was uploaded.
  using Factory = std::function<PredictorPtr(const std::string& arg,
                                             const std::optional<BinaryMask>& gt)>;

  /// Registry with the built-in predictors.
  static PredictorRegistry with_defaults();

  void add(const std::string& kind, Factory factory);
  PredictorPtr resolve(const std::string& spec,
                       const std::optional<BinaryMask>& gt = std::nullopt) const;

 private:
  std::map<std::string, Factory> factories_;
};

struct ServiceConfig {
  std::string default_predictor = "geodesic";
  std::size_t max_sessions = 256;
  EncodingConfig encoding;

  /// Reads CLICKSEG_MAX_SESSIONS when set.
  static std::size_t max_sessions_from_env(std::size_t fallback = 256);
};

/// Transport-independent result of a handler: HTTP status and JSON body.
struct ServiceResponse {
  int status = 200;
  std::string body;
};

class SessionService {
 public:
  explicit SessionService(ServiceConfig cfg = {},
                          PredictorRegistry registry = PredictorRegistry::with_defaults());

  ServiceResponse create_session(const std::string& image_bytes,
                                 const std::optional<std::string>& mask_bytes,
                                 const std::optional<std::string>& gt_bytes,
                                 const std::optional<std::string>& predictor);
  ServiceResponse add_click(const std::string& session_id, const std::string& body);
  ServiceResponse undo(const std::string& session_id);
  ServiceResponse state(const std::string& session_id) const;

  std::size_t session_count() const;
  /// All sessions as JSON (clicks, mask, dims, predictor, timestamps).
  std::string snapshot_json() const;

  /// Installs the routes on `server`.
  void mount(httplib::Server& server);

 private:
  struct Session {
    std::string id;
    InteractionState state;
    std::string predictor_spec;
    PredictorPtr predictor;
    std::optional<BinaryMask> gt;
    std::int64_t created_ms = 0;
    std::int64_t updated_ms = 0;
    std::atomic<std::uint64_t> last_used{0};  // LRU tick
    mutable std::mutex mutex;
  };
  using SessionPtr = std::shared_ptr<Session>;

  SessionPtr find(const std::string& id) const;
  void touch(Session& s) const;
  std::string new_session_id();
  static void bump_updated(Session& s);

  ServiceConfig cfg_;
  PredictorRegistry registry_;
  mutable std::shared_mutex store_mutex_;
  std::map<std::string, SessionPtr> sessions_;
  mutable std::atomic<std::uint64_t> tick_{0};
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
};

}  // namespace clickseg
