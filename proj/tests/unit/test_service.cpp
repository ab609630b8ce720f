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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include "codenames/config.hpp"
#include "codenames/http.hpp"
#include "codenames/service.hpp"
#include "support/fixtures.hpp"

namespace codenames {
namespace {

using nlohmann::json;
using testing::data_path;
using testing::TempDir;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

std::shared_ptr<const ClueEngine> fixture_engine() {
  static auto engine = [] {
    EngineConfig c;
    c.wordlist = data_path("wordlist.txt");
    c.docfreq = data_path("fixture_docfreq.tsv");
    c.dict = data_path("fixture_dict.txt");
    c.embeddings["fixture"] = data_path("fixture_vectors.txt");
    c.scoring.top_t = 50;
    c.index = IndexMode::kExact;
    return std::shared_ptr<const ClueEngine>(build_engine(c));
  }();
  return engine;
}

CreateSessionRequest request(std::size_t boards, std::uint64_t seed) {
  CreateSessionRequest r;
  r.board_count = boards;
  r.seed = seed;
  r.configs = {parse_trial_config("fixture/ours"), parse_trial_config("fixture+DETECT/kim")};
  return r;
}

// Picks one intended word and one other board word.
TrialResponse answer(const Trial& t, std::size_t variant) {
  TrialResponse r;
  r.trial_id = t.id;
  r.responder_id = "tester";
  r.rank1 = t.intended.words()[variant % 2];
  for (const auto& w : t.display_order) {
    if (!t.intended.contains(w)) {
      if (r.rank2.empty()) {
        r.rank2 = w;
      } else if (variant % 3 == 0) {
        r.rank3 = w;
        break;
      }
    }
  }
  r.timestamp = 1700000000000 + static_cast<std::int64_t>(variant);
  return r;
}

TEST(SessionStore, FullFlow) {
  TempDir dir;
  SessionStore store(dir.path(), fixture_engine());
  auto s = store.create_session(request(2, 7));
  EXPECT_EQ(s.id, "s7-0");
  EXPECT_EQ(s.total, 4u);
  auto trials = store.trials(s.id);
  ASSERT_EQ(trials.size(), 4u);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    auto first = store.next_trial(s.id);
    EXPECT_EQ(store.next_trial(s.id), first);
    EXPECT_EQ(first["trialId"], trials[i].id);
    EXPECT_EQ(first["progress"]["answered"], i);
    EXPECT_EQ(first["progress"]["total"], 4);
    auto reply = store.submit_response(s.id, answer(trials[i], i));
    EXPECT_EQ(reply["accepted"], true);
    EXPECT_EQ(reply["progress"]["answered"], i + 1);
  }
  EXPECT_EQ(code_of([&] { store.next_trial(s.id); }), ErrorCode::kSessionComplete);
  EXPECT_EQ(code_of([&] { store.submit_response(s.id, answer(trials[0], 0)); }), ErrorCode::kSessionComplete);
  EXPECT_TRUE(std::filesystem::exists(dir / "s7-0" / "session.json"));
  EXPECT_EQ(store.create_session(request(1, 7)).id, "s7-1");
}

TEST(SessionStore, PayloadHidesColorsAndIntendedWords) {
  TempDir dir;
  SessionStore store(dir.path(), fixture_engine());
  auto s = store.create_session(request(1, 3));
  auto payload = store.next_trial(s.id);
  const std::set<std::string> keys{"schemaVersion", "trialId", "words", "clue", "progress"};
  for (const auto& [k, v] : payload.items()) EXPECT_TRUE(keys.contains(k)) << k;
  auto t = store.trials(s.id).front();
  EXPECT_EQ(payload["words"].size(), 20u);
  std::vector<std::string> shown = payload["words"];
  std::vector<std::string> expected;
  for (const auto& w : t.board.all_words()) expected.push_back(w.str());
  std::sort(shown.begin(), shown.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(shown, expected);
  EXPECT_EQ(payload["clue"], t.clue.str());
}

TEST(SessionStore, ValidationAndStaleTrials) {
  TempDir dir;
  SessionStore store(dir.path(), fixture_engine());
  auto s = store.create_session(request(1, 11));
  auto trials = store.trials(s.id);
  auto stale = answer(trials[1], 0);
  EXPECT_EQ(code_of([&] { store.submit_response(s.id, stale); }), ErrorCode::kStaleTrial);
  auto off_board = answer(trials[0], 0);
  off_board.rank2 = WordToken::normalize("zibeline");
  EXPECT_EQ(code_of([&] { store.submit_response(s.id, off_board); }), ErrorCode::kValidationError);
  auto dup = answer(trials[0], 0);
  dup.rank2 = dup.rank1;
  EXPECT_EQ(code_of([&] { store.submit_response(s.id, dup); }), ErrorCode::kValidationError);
  EXPECT_EQ(store.responses(s.id).size(), 0u);
  EXPECT_EQ(code_of([&] { store.next_trial("s0-99"); }), ErrorCode::kUnknownSession);
  EXPECT_EQ(code_of([&] { store.next_trial("../s11-0"); }), ErrorCode::kUnknownSession);
}

TEST(SessionStore, InvalidRequestsLeaveNothingBehind) {
  TempDir dir;
  SessionStore store(dir.path(), fixture_engine());
  auto none = request(0, 1);
  EXPECT_EQ(code_of([&] { store.create_session(none); }), ErrorCode::kInvalidConfig);
  auto empty = request(1, 1);
  empty.configs.clear();
  EXPECT_EQ(code_of([&] { store.create_session(empty); }), ErrorCode::kInvalidConfig);
  auto unknown = request(1, 1);
  unknown.configs.push_back(parse_trial_config("glove/ours"));
  EXPECT_EQ(code_of([&] { store.create_session(unknown); }), ErrorCode::kInvalidConfig);
  EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
  EXPECT_EQ(code_of([] { create_request_from_json(json::parse(R"({"configSet":["fixture/ours"]})")); }),
            ErrorCode::kInvalidConfig);
}

TEST(SessionStore, SameSeedSameTrials) {
  TempDir a, b;
  SessionStore sa(a.path(), fixture_engine()), sb(b.path(), fixture_engine());
  auto ta = sa.trials(sa.create_session(request(3, 42)).id);
  auto tb = sb.trials(sb.create_session(request(3, 42)).id);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(trial_to_json(ta[i]), trial_to_json(tb[i]));
}

TEST(SessionStore, ResultsMatchOfflineReportByteForByte) {
  TempDir dir;
  std::string id;
  {
    SessionStore store(dir.path(), fixture_engine());
    id = store.create_session(request(3, 5)).id;
    auto trials = store.trials(id);
    for (std::size_t i = 0; i < 4; ++i) store.submit_response(id, answer(trials[i], i));
  }
  SessionStore reopened(dir.path(), fixture_engine());
  EXPECT_EQ(reopened.responses(id).size(), 4u);
  auto trials = reopened.trials(id);
  for (std::size_t i = 4; i < trials.size(); ++i) reopened.submit_response(id, answer(trials[i], i));
  const auto live = report_to_json(reopened.session_results(id)).dump();

  auto doc = json::parse(testing::slurp(dir / id / "session.json"));
  std::vector<Trial> offline_trials;
  for (const auto& t : doc["trials"]) offline_trials.push_back(trial_from_json(t));
  std::ifstream in(dir / id / "responses.jsonl");
  auto offline = aggregate(join_responses(read_responses(in), offline_trials));
  EXPECT_EQ(report_to_json(offline).dump(), live);
  EXPECT_EQ(offline.configs.size(), 2u);
}

TEST(SessionStore, IndependentSessionsInParallel) {
  TempDir dir;
  SessionStore store(dir.path(), fixture_engine());
  std::vector<std::string> ids;
  for (std::uint64_t seed = 0; seed < 4; ++seed) ids.push_back(store.create_session(request(2, seed)).id);
  std::vector<std::thread> workers;
  for (const auto& id : ids) {
    workers.emplace_back([&store, id] {
      auto trials = store.trials(id);
      for (std::size_t i = 0; i < trials.size(); ++i) store.submit_response(id, answer(trials[i], i));
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& id : ids) EXPECT_EQ(store.responses(id).size(), 4u);
}

class HttpServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_ = std::make_unique<SessionStore>(dir_.path(), fixture_engine());
    http_ = std::make_unique<HttpService>(*store_);
    port_ = http_->bind_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    http_->stop();
    thread_.join();
  }

  std::pair<int, json> post(const std::string& path, const std::string& body) {
    auto res = client_->Post(path, body, "application/json");
    return {res->status, json::parse(res->body)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto res = client_->Get(path);
    return {res->status, json::parse(res->body)};
  }

  TempDir dir_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<HttpService> http_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpServiceTest, SessionEndpoints) {
  auto [hs, health] = get("/api/health");
  EXPECT_EQ(hs, 200);
  EXPECT_EQ(health["status"], "ok");

  auto [cs, created] = post("/api/sessions", R"({"boardCount":1,"configSet":["fixture/ours","fixture+DETECT/ours"],"seed":9})");
  ASSERT_EQ(cs, 201);
  const std::string id = created["sessionId"];
  EXPECT_EQ(created["totalTrials"], 2);
  EXPECT_EQ(created["configSet"][1]["detect"], true);

  auto trials = store_->trials(id);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    auto [ns, next] = get("/api/sessions/" + id + "/next");
    ASSERT_EQ(ns, 200);
    EXPECT_EQ(next["trialId"], trials[i].id);
    EXPECT_FALSE(next.contains("intended"));
    auto body = response_to_json(answer(trials[i], i));
    auto [rs, reply] = post("/api/sessions/" + id + "/responses", body.dump());
    EXPECT_EQ(rs, 200);
    EXPECT_EQ(reply["accepted"], true);
  }
  auto [ds, done] = get("/api/sessions/" + id + "/next");
  EXPECT_EQ(ds, 409);
  EXPECT_EQ(done["error"]["code"], "SessionComplete");

  auto [ms, metrics] = get("/api/sessions/" + id + "/results");
  EXPECT_EQ(ms, 200);
  EXPECT_EQ(metrics.dump(), report_to_json(store_->session_results(id)).dump());
}

TEST_F(HttpServiceTest, ErrorStatuses) {
  auto [bad, bad_body] = post("/api/sessions", "not json");
  EXPECT_EQ(bad, 400);
  EXPECT_EQ(bad_body["error"]["code"], "InvalidConfig");
  auto [unk, unk_body] = post("/api/sessions", R"({"boardCount":1,"configSet":["glove/ours"]})");
  EXPECT_EQ(unk, 400);
  EXPECT_EQ(get("/api/sessions/nope/next").first, 404);
  EXPECT_EQ(get("/api/sessions/nope/results").first, 404);

  auto [cs, created] = post("/api/sessions", R"({"boardCount":1,"configSet":["fixture/kim"],"seed":2})");
  ASSERT_EQ(cs, 201);
  const std::string id = created["sessionId"];
  auto trial = store_->trials(id).front();
  auto stale = response_to_json(answer(trial, 0));
  stale["trialId"] = "other";
  auto [ss, stale_body] = post("/api/sessions/" + id + "/responses", stale.dump());
  EXPECT_EQ(ss, 409);
  EXPECT_EQ(stale_body["error"]["code"], "StaleTrial");
  auto [vs, v_body] = post("/api/sessions/" + id + "/responses", R"({"trialId":")" + trial.id + R"(","rank1":"x"})");
  EXPECT_EQ(vs, 422);
  EXPECT_EQ(v_body["error"]["code"], "ValidationError");
  auto off = response_to_json(answer(trial, 0));
  off["rank2"] = "zibeline";
  EXPECT_EQ(post("/api/sessions/" + id + "/responses", off.dump()).first, 422);
}

}  // namespace
}  // namespace codenames
