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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "codenames/babelnet/graph.hpp"
#include "codenames/babelnet/source.hpp"
#include "codenames/error.hpp"

namespace codenames::babelnet {

using Clock = std::function<double()>;  // seconds

inline double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

// Single shared token bucket enforcing a requests-per-day budget. Tokens refill
// continuously at budget/86400 per second up to the budget.
class DailyBudget {
 public:
  explicit DailyBudget(double requests_per_day, Clock clock = steady_seconds)
      : capacity_(requests_per_day), tokens_(requests_per_day), clock_(std::move(clock)),
        last_(clock_()) {
    if (requests_per_day <= 0) throw Error(ErrorCode::kInvalidConfig, "daily budget must be positive");
  }

  // Takes one token or throws ApiQuotaExceeded.
  void acquire() {
    std::lock_guard lock(mu_);
    refill();
    if (tokens_ < 1.0) {
      throw Error(ErrorCode::kApiQuotaExceeded, "client-side daily request budget exhausted");
    }
    tokens_ -= 1.0;
  }

  double available() {
    std::lock_guard lock(mu_);
    refill();
    return tokens_;
  }

 private:
  void refill() {
    double now = clock_();
    tokens_ = std::min(capacity_, tokens_ + (now - last_) * capacity_ / 86400.0);
    last_ = now;
  }

  std::mutex mu_;
  double capacity_;
  double tokens_;
  Clock clock_;
  double last_;
};

struct ClientOptions {
  std::string base_url = "https://babelnet.io/v9";
  std::string key;  // falls back to $BABELNET_KEY
  std::string language = "EN";
  double requests_per_day = 1000;
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{30};
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

inline std::string resolve_api_key(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("BABELNET_KEY"); env && *env) return env;
  return {};
}

// Live source backed by the BabelNet REST API. Every request draws from the
// shared DailyBudget; transport errors and 5xx responses are retried with
// exponential backoff.
class BabelNetClient : public GraphSource {
 public:
  explicit BabelNetClient(ClientOptions options, RelationClassifier classifier = {},
                          std::shared_ptr<DailyBudget> budget = nullptr)
      : options_(std::move(options)), classifier_(std::move(classifier)), budget_(std::move(budget)) {
    options_.key = resolve_api_key(options_.key);
    if (options_.key.empty()) {
      throw Error(ErrorCode::kMissingKey, "set BABELNET_KEY or configure babelnet.key");
    }
    if (!budget_) budget_ = std::make_shared<DailyBudget>(options_.requests_per_day);
    split_base_url();
  }

  std::vector<std::string> synset_ids(const WordToken& lemma) override {
    auto j = get("/getSynsetIds", {{"lemma", lemma.str()}, {"searchLang", options_.language}});
    expect_array(j);
    std::vector<std::string> ids;
    for (const auto& item : j) {
      auto id = item.value("id", std::string());
      if (!id.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    return ids;
  }

  Synset synset(const std::string& id) override {
    auto j = get("/getSynset", {{"id", id}, {"targetLang", options_.language}});
    if (!j.is_object() || !j.contains("senses")) raise_api_message(j);
    return parse_synset(id, j, options_.language);
  }

  std::vector<Edge> outgoing_edges(const std::string& id) override {
    auto j = get("/getOutgoingEdges", {{"id", id}});
    expect_array(j);
    std::vector<Edge> edges;
    for (const auto& item : j) {
      auto lang = item.value("language", std::string(options_.language));
      if (lang != options_.language && lang != "MUL") continue;
      auto target = item.value("target", std::string());
      if (target.empty() || target == id || !item.contains("pointer")) continue;
      const auto& ptr = item["pointer"];
      auto relation = ptr.value("shortName", ptr.value("name", std::string()));
      edges.push_back(make_edge(id, target, relation, ptr.value("isAutomatic", false), classifier_));
    }
    return edges;
  }

  static Synset parse_synset(const std::string& id, const nlohmann::json& j, const std::string& language) {
    std::vector<std::string> lemmas;
    std::string pos;
    for (const auto& sense : j.at("senses")) {
      const auto& p = sense.contains("properties") ? sense["properties"] : sense;
      if (p.value("language", language) != language) continue;
      std::string lemma = p.value("fullLemma", std::string());
      if (lemma.empty() && p.contains("lemma")) {
        lemma = p["lemma"].is_object() ? p["lemma"].value("lemma", std::string())
                                       : p["lemma"].get<std::string>();
      }
      if (lemma.empty()) continue;
      if (pos.empty()) pos = p.value("pos", std::string());
      if (std::find(lemmas.begin(), lemmas.end(), lemma) == lemmas.end()) lemmas.push_back(lemma);
    }
    Synset s;
    s.id = id;
    s.pos = pos;
    if (j.contains("mainSense") && j["mainSense"].is_string()) s.main_sense = j["mainSense"].get<std::string>();
    if (s.main_sense.empty() && !lemmas.empty()) s.main_sense = lemmas.front();
    if (s.main_sense.empty()) s.main_sense = id;
    for (const auto& l : lemmas) {
      if (l != s.main_sense) s.other_senses.push_back(l);
    }
    if (j.contains("glosses")) {
      for (const auto& g : j["glosses"]) {
        if (g.value("language", language) == language && g.contains("gloss")) {
          s.definition = g["gloss"].get<std::string>();
          break;
        }
      }
    }
    return s;
  }

 private:
  void split_base_url() {
    auto scheme_end = options_.base_url.find("://");
    auto path_start = options_.base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    host_ = options_.base_url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  static void raise_api_message(const nlohmann::json& j) {
    std::string msg = j.is_object() ? j.value("message", j.dump()) : j.dump();
    std::string lower = msg;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find("limit") != std::string::npos || lower.find("key") != std::string::npos) {
      throw Error(ErrorCode::kApiQuotaExceeded, msg);
    }
    throw Error(ErrorCode::kNetworkFailure, "unexpected response: " + msg);
  }

  static void expect_array(const nlohmann::json& j) {
    if (!j.is_array()) raise_api_message(j);
  }

  nlohmann::json get(const std::string& endpoint, httplib::Params params) {
    params.emplace("key", options_.key);
    const std::string path = httplib::append_query_params(prefix_ + endpoint, params);
    auto backoff = options_.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) {
        options_.sleep(backoff);
        backoff *= 2;
      }
      budget_->acquire();
      httplib::Client client(host_);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_default_headers({{"Accept-Encoding", "identity"}});
      auto res = client.Get(path);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status == 403) {
        throw Error(ErrorCode::kApiQuotaExceeded, "HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw Error(ErrorCode::kNetworkFailure, "HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kNetworkFailure, std::string("invalid JSON: ") + e.what());
      }
    }
    throw Error(ErrorCode::kNetworkFailure,
                endpoint + " failed after " + std::to_string(options_.max_retries + 1) + " attempts: " + last_error);
  }

  ClientOptions options_;
  RelationClassifier classifier_;
  std::shared_ptr<DailyBudget> budget_;
  std::string host_;
  std::string prefix_;
};

}  // namespace codenames::babelnet
