// Copyright 2026 The Codenames WSF Authors.
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

#include <filesystem>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "codenames/error.hpp"
#include "codenames/eval.hpp"
#include "codenames/service.hpp"

namespace codenames {

inline int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
      return 404;
    case ErrorCode::kSessionComplete:
    case ErrorCode::kStaleTrial:
      return 409;
    case ErrorCode::kValidationError:
    case ErrorCode::kInvalidResponse:
    case ErrorCode::kEmptyToken:
      return 422;
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kMissingResource:
    case ErrorCode::kMalformedRecord:
      return 400;
    default:
      return 500;
  }
}

inline std::string error_body(ErrorCode code, const std::string& message) {
  return nlohmann::json{{"schemaVersion", kSchemaVersion},
                        {"error", {{"code", error_code_name(code)}, {"message", message}}}}
      .dump();
}

// Routes the session API onto an httplib server. Optional static assets are
// served from `static_dir` at '/'.
class HttpService {
 public:
  explicit HttpService(SessionStore& store, std::filesystem::path static_dir = {}) : store_(store) {
    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
      server_.set_mount_point("/", static_dir.string());
    }
    server_.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(nlohmann::json{{"schemaVersion", kSchemaVersion}, {"status", "ok"}}.dump(), kJson);
    });
    server_.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        auto summary = store_.create_session(create_request_from_json(parse_body(req, ErrorCode::kInvalidConfig)));
        nlohmann::json configs = nlohmann::json::array();
        for (const auto& c : summary.configs) configs.push_back(config_to_json(c));
        res.status = 201;
        return nlohmann::json{{"schemaVersion", kSchemaVersion},
                              {"sessionId", summary.id},
                              {"totalTrials", summary.total},
                              {"configSet", configs}};
      });
    });
    server_.Get(R"(/api/sessions/([^/]+)/next)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return store_.next_trial(req.matches[1]); });
    });
    server_.Post(R"(/api/sessions/([^/]+)/responses)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const std::string id = req.matches[1];
        auto body = parse_body(req, ErrorCode::kValidationError);
        TrialResponse r;
        try {
          r = response_from_json(body);
        } catch (const Error& e) {
          throw Error(ErrorCode::kValidationError, e.detail());
        }
        return store_.submit_response(id, r);
      });
    });
    server_.Get(R"(/api/sessions/([^/]+)/results)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return report_to_json(store_.session_results(req.matches[1])); });
    });
  }

  httplib::Server& server() { return server_; }

  // Blocks until stop(); returns false if the socket could not be bound.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  static constexpr const char* kJson = "application/json";

  static nlohmann::json parse_body(const httplib::Request& req, ErrorCode on_error) {
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw Error(on_error, "request body must be a JSON object");
    return body;
  }

  template <class F>
  static void handle(httplib::Response& res, F&& f) {
    try {
      auto body = f();
      res.set_content(body.dump(), kJson);
    } catch (const Error& e) {
      res.status = http_status_for(e.code());
      res.set_content(error_body(e.code(), e.detail()), kJson);
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(error_body(ErrorCode::kIoError, e.what()), kJson);
    }
  }

  SessionStore& store_;
  httplib::Server server_;
};

}  // namespace codenames
