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

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codenames/cluegiver.hpp"
#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"
#include "codenames/eval.hpp"
#include "codenames/io.hpp"
#include "codenames/rng.hpp"
#include "codenames/scoring.hpp"

namespace codenames {

inline constexpr int kSchemaVersion = 1;

// A named relatedness source plus the resources DETECT needs for it.
struct Representation {
  std::shared_ptr<const RelatednessSource> source;
  std::shared_ptr<const DocFreqTable> df;
  StorePtr dict;
  std::optional<double> lambda_d;  // overrides ScoringParams::lambda_d
};

// Everything needed to deal boards and give clues for a set of configurations.
class ClueEngine {
 public:
  ClueEngine(TokenList wordlist, ScoringParams params, std::size_t per_team = 10, ClueOptions options = {})
      : wordlist_(std::move(wordlist)), params_(params), per_team_(per_team), options_(options) {
    params_.validate();
  }

  void add_representation(const std::string& name, Representation rep) {
    if (!rep.source) throw Error(ErrorCode::kInvalidConfig, "representation '" + name + "' has no source");
    reps_[name] = std::move(rep);
  }

  bool has(const std::string& name) const { return reps_.contains(name); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : reps_) out.push_back(k);
    return out;
  }

  const ScoringParams& params() const { return params_; }
  std::size_t per_team() const { return per_team_; }
  const TokenList& wordlist() const { return wordlist_; }

  void check(const TrialConfig& config) const {
    auto it = reps_.find(config.representation);
    if (it == reps_.end()) {
      throw Error(ErrorCode::kInvalidConfig, "representation '" + config.representation + "' is not loaded");
    }
    if (config.detect && !it->second.df) {
      throw Error(ErrorCode::kInvalidConfig, "'" + config.name() + "' needs a document-frequency table");
    }
  }

  Board deal(std::uint64_t seed) const { return generate_board(wordlist_, per_team_, seed); }

  ClueResult give_clue(const Board& board, const TrialConfig& config) const {
    check(config);
    const auto& rep = reps_.at(config.representation);
    ScoringParams p = params_;
    if (rep.lambda_d) p.lambda_d = *rep.lambda_d;
    auto result = choose_clue(board, *rep.source, p, config.scoring_fn, config.detect,
                              DetectResources{rep.df.get(), rep.dict.get()}, options_);
    result.representation = config.representation;
    return result;
  }

 private:
  TokenList wordlist_;
  ScoringParams params_;
  std::size_t per_team_;
  ClueOptions options_;
  std::map<std::string, Representation> reps_;
};

struct CreateSessionRequest {
  std::size_t board_count = 1;
  std::vector<TrialConfig> configs;
  std::uint64_t seed = 0;
};

inline CreateSessionRequest create_request_from_json(const nlohmann::json& j) {
  try {
    CreateSessionRequest r;
    r.board_count = j.at("boardCount").get<std::size_t>();
    r.seed = j.value("seed", std::uint64_t{0});
    for (const auto& c : j.at("configSet")) {
      r.configs.push_back(c.is_string() ? parse_trial_config(c.get<std::string>()) : config_from_json(c));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

// Builds the trials of one session: for each dealt board, one clue per
// config. Trial order and each display order are shuffled with the seed.
inline std::vector<Trial> build_trials(const ClueEngine& engine, const CreateSessionRequest& request,
                                       const std::string& id_prefix) {
  if (request.board_count == 0) throw Error(ErrorCode::kInvalidConfig, "boardCount must be positive");
  if (request.configs.empty()) throw Error(ErrorCode::kInvalidConfig, "configSet is empty");
  for (const auto& c : request.configs) engine.check(c);
  SeededRng rng(request.seed);
  std::vector<Trial> trials;
  for (std::size_t b = 0; b < request.board_count; ++b) {
    auto board = engine.deal(rng.next());
    for (const auto& config : request.configs) {
      ClueResult clue;
      try {
        clue = engine.give_clue(board, config);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kUnknownBoardWord) throw Error(ErrorCode::kMissingResource, e.detail());
        throw;
      }
      Trial t;
      t.board = board;
      t.display_order = board.all_words();
      rng.shuffle(t.display_order);
      t.clue = clue.clue;
      t.intended = clue.intended;
      t.config = config;
      trials.push_back(std::move(t));
    }
  }
  rng.shuffle(trials);
  for (std::size_t i = 0; i < trials.size(); ++i) trials[i].id = id_prefix + "-" + std::to_string(i);
  return trials;
}

// What a responder sees: no team colors, no intended words.
inline nlohmann::json public_trial_json(const Trial& t, std::size_t answered, std::size_t total) {
  return {{"schemaVersion", kSchemaVersion},
          {"trialId", t.id},
          {"words", tokens_to_json(t.display_order)},
          {"clue", t.clue.str()},
          {"progress", {{"answered", answered}, {"total", total}}}};
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::int64_t unix_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct SessionSummary {
  std::string id;
  std::size_t total = 0;
  std::vector<TrialConfig> configs;
};

// Sessions persisted as <dir>/<id>/session.json (written once) and
// <dir>/<id>/responses.jsonl (append-only). Each session is single-writer;
// distinct sessions proceed independently.
class SessionStore {
 public:
  SessionStore(std::filesystem::path dir, std::shared_ptr<const ClueEngine> engine)
      : dir_(std::move(dir)), engine_(std::move(engine)) {
    std::filesystem::create_directories(dir_);
  }

  SessionSummary create_session(const CreateSessionRequest& request) {
    if (!engine_) throw Error(ErrorCode::kInvalidConfig, "no clue engine configured");
    const auto id = reserve_id(request.seed);
    std::vector<Trial> trials;
    try {
      trials = build_trials(*engine_, request, id);
    } catch (...) {
      std::error_code ec;
      std::filesystem::remove_all(dir_ / id, ec);
      throw;
    }
    nlohmann::json doc = {{"schemaVersion", kSchemaVersion},
                          {"id", id},
                          {"createdAt", utc_timestamp()},
                          {"seed", request.seed},
                          {"boardCount", request.board_count}};
    doc["configSet"] = nlohmann::json::array();
    for (const auto& c : request.configs) doc["configSet"].push_back(config_to_json(c));
    doc["trials"] = nlohmann::json::array();
    for (const auto& t : trials) doc["trials"].push_back(trial_to_json(t));
    atomic_write(dir_ / id / "session.json", doc.dump() + "\n");
    auto state = std::make_shared<State>();
    state->id = id;
    state->trials = std::move(trials);
    state->configs = request.configs;
    SessionSummary summary{id, state->trials.size(), request.configs};
    std::lock_guard lock(mutex_);
    sessions_[id] = std::move(state);
    return summary;
  }

  nlohmann::json next_trial(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    const auto cursor = s->responses.size();
    if (cursor >= s->trials.size()) throw Error(ErrorCode::kSessionComplete, id);
    return public_trial_json(s->trials[cursor], cursor, s->trials.size());
  }

  nlohmann::json submit_response(const std::string& id, TrialResponse response) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    const auto cursor = s->responses.size();
    if (cursor >= s->trials.size()) throw Error(ErrorCode::kSessionComplete, id);
    const auto& trial = s->trials[cursor];
    if (response.trial_id != trial.id) {
      throw Error(ErrorCode::kStaleTrial, "expected a response to '" + trial.id + "', got '" + response.trial_id + "'");
    }
    try {
      validate_response(response, trial.board);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidationError, e.detail());
    }
    if (response.timestamp == 0) response.timestamp = unix_millis();
    append_line(dir_ / id / "responses.jsonl", response_to_json(response).dump());
    s->responses.push_back(std::move(response));
    return {{"schemaVersion", kSchemaVersion},
            {"accepted", true},
            {"trialId", trial.id},
            {"progress", {{"answered", s->responses.size()}, {"total", s->trials.size()}}}};
  }

  // Aggregate over the answered prefix.
  MetricsReport session_results(const std::string& id) {
    auto s = session(id);
    std::vector<std::pair<TrialResponse, Trial>> joined;
    {
      std::lock_guard lock(s->mutex);
      for (std::size_t i = 0; i < s->responses.size(); ++i) joined.emplace_back(s->responses[i], s->trials[i]);
    }
    return aggregate(joined);
  }

  std::vector<Trial> trials(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    return s->trials;
  }

  std::vector<TrialResponse> responses(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    return s->responses;
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct State {
    std::mutex mutex;
    std::string id;
    std::vector<Trial> trials;
    std::vector<TrialConfig> configs;
    std::vector<TrialResponse> responses;
  };

  std::string reserve_id(std::uint64_t seed) {
    std::lock_guard lock(mutex_);
    for (std::uint64_t n = 0;; ++n) {
      auto id = "s" + std::to_string(seed) + "-" + std::to_string(n);
      if (sessions_.contains(id)) continue;
      if (std::filesystem::create_directory(dir_ / id)) return id;
    }
  }

  // Sessions created by an earlier process are loaded from disk on first use.
  std::shared_ptr<State> session(const std::string& id) {
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    const bool safe = !id.empty() && id.find_first_of("/\\.") == std::string::npos;
    const auto path = dir_ / id / "session.json";
    if (!safe || !std::filesystem::exists(path)) throw Error(ErrorCode::kUnknownSession, id);
    auto state = std::make_shared<State>();
    auto doc = nlohmann::json::parse(read_file(path));
    state->id = id;
    for (const auto& t : doc.at("trials")) state->trials.push_back(trial_from_json(t));
    for (const auto& c : doc.at("configSet")) state->configs.push_back(config_from_json(c));
    if (std::ifstream in(dir_ / id / "responses.jsonl"); in) state->responses = read_responses(in);
    sessions_[id] = state;
    return state;
  }

  std::filesystem::path dir_;
  std::shared_ptr<const ClueEngine> engine_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<State>> sessions_;
};

}  // namespace codenames
