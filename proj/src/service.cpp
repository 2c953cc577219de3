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

#include "clickseg/service.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <span>

#include "clickseg/featherweight.hpp"
#include "clickseg/geodesic.hpp"
#include "clickseg/imageio.hpp"
#include "clickseg/imageproc.hpp"
#include "clickseg/remote.hpp"
#include "clickseg/wire.hpp"
#include "httplib.h"
#include "json.hpp"

namespace clickseg {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// PredictorRegistry
// ---------------------------------------------------------------------------

PredictorRegistry PredictorRegistry::with_defaults() {
  PredictorRegistry r;
  r.add("geodesic", [](const std::string&, const std::optional<BinaryMask>&) {
    return std::make_shared<GeodesicPredictor>();
  });
  r.add("oracle", [](const std::string&, const std::optional<BinaryMask>& gt) {
    if (!gt) throw UnknownPredictorError("oracle predictor needs a ground-truth upload");
    return std::make_shared<OraclePredictor>(*gt);
  });
  r.add("constant", [](const std::string& arg, const std::optional<BinaryMask>&) {
    return std::make_shared<ConstantPredictor>(arg.empty() ? 0.0 : std::stod(arg));
  });
  r.add("featherweight", [](const std::string& arg, const std::optional<BinaryMask>&) {
    if (arg.empty()) throw UnknownPredictorError("featherweight needs a model file");
    return std::make_shared<FeatherweightPredictor>(FeatherweightModel::load(arg));
  });
  r.add("remote", [](const std::string& arg, const std::optional<BinaryMask>&) {
    if (arg.empty()) throw UnknownPredictorError("remote needs an endpoint URL");
    return std::make_shared<RemotePredictor>(arg);
  });
  return r;
}

void PredictorRegistry::add(const std::string& kind, Factory factory) {
  factories_[kind] = std::move(factory);
}

PredictorPtr PredictorRegistry::resolve(const std::string& spec,
                                        const std::optional<BinaryMask>& gt) const {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto it = factories_.find(kind);
  if (it == factories_.end()) {
    throw UnknownPredictorError("unknown predictor '" + spec + "'");
  }
  try {
    return it->second(arg, gt);
  } catch (const UnknownPredictorError&) {
    throw;
  } catch (const std::exception& e) {
    throw UnknownPredictorError("predictor '" + spec + "': " + e.what());
  }
}

std::size_t ServiceConfig::max_sessions_from_env(std::size_t fallback) {
  const char* v = std::getenv("CLICKSEG_MAX_SESSIONS");
  if (!v || !*v) return fallback;
  try {
    const long long n = std::stoll(v);
    if (n >= 1) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  spdlog::warn("ignoring invalid CLICKSEG_MAX_SESSIONS='{}'", v);
  return fallback;
}

// ---------------------------------------------------------------------------
// SessionService
// ---------------------------------------------------------------------------

namespace {

ServiceResponse error_response(int status, const std::string& message) {
  return {status, json{{"error", message}}.dump()};
}

ServiceResponse ok(const json& body) { return {200, body.dump()}; }

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

json clicks_json(const ClickList& clicks) {
  json out = json::array();
  for (const Click& c : clicks) {
    out.push_back({{"row", c.row},
                   {"col", c.col},
                   {"polarity", to_string(c.polarity)},
                   {"order", c.order}});
  }
  return out;
}

}  // namespace

SessionService::SessionService(ServiceConfig cfg, PredictorRegistry registry)
    : cfg_(std::move(cfg)), registry_(std::move(registry)),
      id_rng_(std::random_device{}()) {
  if (cfg_.max_sessions < 1) throw PreconditionError("max_sessions must be >= 1");
  cfg_.encoding.validate();
}

std::string SessionService::new_session_id() {
  std::lock_guard lock(id_mutex_);
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(id_rng_()),
                static_cast<unsigned long long>(id_rng_()));
  return buf;
}

void SessionService::touch(Session& s) const { s.last_used = ++tick_; }

void SessionService::bump_updated(Session& s) {
  s.updated_ms = std::max(now_ms(), s.updated_ms + 1);
}

SessionService::SessionPtr SessionService::find(const std::string& id) const {
  std::shared_lock lock(store_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  touch(*it->second);
  return it->second;
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(store_mutex_);
  return sessions_.size();
}

ServiceResponse SessionService::create_session(
    const std::string& image_bytes, const std::optional<std::string>& mask_bytes,
    const std::optional<std::string>& gt_bytes,
    const std::optional<std::string>& predictor) {
  auto session = std::make_shared<Session>();
  try {
    auto image = std::make_shared<const RgbImage>(to_rgb(decode_image(as_bytes(image_bytes))));
    std::optional<BinaryMask> mask;
    if (mask_bytes) mask = to_mask(decode_image(as_bytes(*mask_bytes)));
    if (gt_bytes) {
      session->gt = to_mask(decode_image(as_bytes(*gt_bytes)));
      require_same_shape(*image, *session->gt, "ground truth");
    }
    session->state = new_session(image, std::move(mask));
  } catch (const Error& e) {
    return error_response(400, e.what());
  }

  session->predictor_spec = predictor.value_or(cfg_.default_predictor);
  try {
    session->predictor = registry_.resolve(session->predictor_spec, session->gt);
  } catch (const UnknownPredictorError& e) {
    return error_response(422, e.what());
  }

  session->id = new_session_id();
  session->created_ms = session->updated_ms = now_ms();
  touch(*session);
  {
    std::unique_lock lock(store_mutex_);
    sessions_[session->id] = session;
    while (sessions_.size() > cfg_.max_sessions) {
      auto victim = sessions_.begin();
      for (auto it = sessions_.begin(); it != sessions_.end(); ++it) {
        if (it->second->last_used < victim->second->last_used) victim = it;
      }
      spdlog::info("evicting least recently used session {}", victim->first);
      sessions_.erase(victim);
    }
  }
  return ok({{"session_id", session->id},
             {"height", session->state.height()},
             {"width", session->state.width()}});
}

ServiceResponse SessionService::add_click(const std::string& session_id,
                                          const std::string& body) {
  const SessionPtr s = find(session_id);
  if (!s) return error_response(404, "unknown session '" + session_id + "'");

  Click click;
  try {
    const json j = json::parse(body);
    click.row = j.at("row").get<int>();
    click.col = j.at("col").get<int>();
    click.polarity = parse_polarity(j.at("polarity").get<std::string>());
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed click: ") + e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }

  std::lock_guard lock(s->mutex);
  ClickList clicks;
  try {
    clicks = s->state.clicks_with(click);
  } catch (const ShapeError& e) {
    return error_response(400, e.what());
  }

  ProbMap prob;
  try {
    const PredictorInput input = make_predictor_input(
        s->state.image(), clicks, s->state.prev_mask(), cfg_.encoding);
    prob = s->predictor->predict(input);
  } catch (const PreconditionError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    spdlog::warn("session {}: predictor {} failed: {}", s->id, s->predictor_spec,
                 e.what());
    return error_response(502, std::string("predictor failure: ") + e.what());
  }

  s->state.push_click(click, prob);
  bump_updated(*s);
  json out = {{"mask", rle_encode(s->state.prev_mask())}};
  if (s->gt) out["iou"] = iou(s->state.prev_mask(), *s->gt);
  return ok(out);
}

ServiceResponse SessionService::undo(const std::string& session_id) {
  const SessionPtr s = find(session_id);
  if (!s) return error_response(404, "unknown session '" + session_id + "'");
  std::lock_guard lock(s->mutex);
  if (!s->state.can_undo()) return error_response(409, "nothing to undo");
  s->state.undo();
  bump_updated(*s);
  return ok({{"mask", rle_encode(s->state.prev_mask())}});
}

ServiceResponse SessionService::state(const std::string& session_id) const {
  const SessionPtr s = find(session_id);
  if (!s) return error_response(404, "unknown session '" + session_id + "'");
  std::lock_guard lock(s->mutex);
  return ok({{"clicks", clicks_json(s->state.clicks())},
             {"mask", rle_encode(s->state.prev_mask())},
             {"dims", {{"height", s->state.height()}, {"width", s->state.width()}}},
             {"predictor", s->predictor_spec}});
}

std::string SessionService::snapshot_json() const {
  std::shared_lock store(store_mutex_);
  json out = json::array();
  for (const auto& [id, s] : sessions_) {
    std::lock_guard lock(s->mutex);
    out.push_back({{"session_id", id},
                   {"clicks", clicks_json(s->state.clicks())},
                   {"mask", rle_encode(s->state.prev_mask())},
                   {"dims", {{"height", s->state.height()}, {"width", s->state.width()}}},
                   {"predictor", s->predictor_spec},
                   {"created_ms", s->created_ms},
                   {"updated_ms", s->updated_ms}});
  }
  return out.dump(2);
}

void SessionService::mount(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };

  server.Post("/sessions", [this, reply](const httplib::Request& req,
                                         httplib::Response& res) {
    if (!req.is_multipart_form_data() || !req.has_file("image")) {
      reply(res, error_response(400, "expected multipart form data with an 'image' part"));
      return;
    }
    auto part = [&](const char* key) -> std::optional<std::string> {
      if (!req.has_file(key)) return std::nullopt;
      return req.get_file_value(key).content;
    };
    std::optional<std::string> predictor;
    if (req.has_param("predictor")) {
      predictor = req.get_param_value("predictor");
    } else if (auto p = part("predictor")) {
      predictor = *p;
    }
    reply(res, create_session(req.get_file_value("image").content, part("mask"),
                              part("gt"), predictor));
  });
  server.Post(R"(/sessions/([0-9a-f]+)/clicks)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, add_click(req.matches[1], req.body));
              });
  server.Post(R"(/sessions/([0-9a-f]+)/undo)",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, undo(req.matches[1]));
              });
  server.Get(R"(/sessions/([0-9a-f]+)/state)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, state(req.matches[1]));
             });
}

}  // namespace clickseg
