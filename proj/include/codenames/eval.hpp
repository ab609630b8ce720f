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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "codenames/cluegiver.hpp"
#include "codenames/core.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"
#include "codenames/scoring.hpp"

namespace codenames {

// Which clue-giver produced a trial.
struct TrialConfig {
  std::string representation;
  ScoringFn scoring_fn = ScoringFn::kOurs;
  bool detect = false;

  std::string row_label() const { return representation + (detect ? "+DETECT" : ""); }
  std::string name() const { return row_label() + "/" + std::string(scoring_fn_name(scoring_fn)); }

  friend auto operator<=>(const TrialConfig& a, const TrialConfig& b) {
    return std::tie(a.representation, a.scoring_fn, a.detect) <=> std::tie(b.representation, b.scoring_fn, b.detect);
  }
  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

inline TrialConfig parse_trial_config(std::string_view name) {
  auto slash = name.rfind('/');
  if (slash == std::string_view::npos) throw Error(ErrorCode::kInvalidConfig, "config needs '<rep>[+DETECT]/<fn>'");
  TrialConfig c;
  c.scoring_fn = parse_scoring_fn(name.substr(slash + 1));
  std::string rep(name.substr(0, slash));
  constexpr std::string_view kSuffix = "+DETECT";
  if (rep.size() >= kSuffix.size() && rep.compare(rep.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
    c.detect = true;
    rep.resize(rep.size() - kSuffix.size());
  }
  if (rep.empty()) throw Error(ErrorCode::kInvalidConfig, "empty representation in '" + std::string(name) + "'");
  c.representation = rep;
  return c;
}

struct Trial {
  std::string id;
  Board board;
  TokenList display_order;  // every board word once, colors withheld
  WordToken clue;
  IntendedPair intended;
  TrialConfig config;
};

struct TrialResponse {
  std::string trial_id;
  WordToken rank1;
  WordToken rank2;
  std::optional<WordToken> rank3;
  std::optional<WordToken> rank4;
  std::string responder_id;
  std::int64_t timestamp = 0;  // unix milliseconds

  std::vector<WordToken> ranks() const {
    std::vector<WordToken> out{rank1, rank2};
    if (rank3) out.push_back(*rank3);
    if (rank4) out.push_back(*rank4);
    return out;
  }
};

// Ranks 1 and 2 are required; rank 4 needs rank 3; all ranks are distinct
// board words.
inline void validate_response(const TrialResponse& r, const Board& board) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidResponse, why); };
  if (r.rank1.empty() || r.rank2.empty()) fail("ranks 1 and 2 are required");
  if (!r.rank3 && r.rank4) fail("rank 4 given without rank 3");
  auto ranks = r.ranks();
  for (const auto& w : ranks) {
    if (!board.contains(w)) fail("'" + w.str() + "' is not on the board");
  }
  std::set<WordToken> distinct(ranks.begin(), ranks.end());
  if (distinct.size() != ranks.size()) fail("ranks must be distinct");
}

struct TrialMetrics {
  double precision_at_2 = 0.0;
  double recall_at_4 = 0.0;
};

// Intended words found in ranks 1-2 and in ranks 1-4, each over |intended|.
inline TrialMetrics trial_metrics(const TrialResponse& r, const IntendedPair& intended) {
  if (r.rank1.empty() || r.rank2.empty() || (!r.rank3 && r.rank4)) {
    throw Error(ErrorCode::kInvalidResponse, "ranks 1 and 2 required; rank 4 needs rank 3");
  }
  auto ranks = r.ranks();
  if (std::set<WordToken>(ranks.begin(), ranks.end()).size() != ranks.size()) {
    throw Error(ErrorCode::kInvalidResponse, "ranks must be distinct");
  }
  const double denom = static_cast<double>(intended.size());
  int top2 = 0;
  int top4 = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (!intended.contains(ranks[i])) continue;
    if (i < 2) ++top2;
    ++top4;
  }
  return TrialMetrics{top2 / denom, top4 / denom};
}

struct ZTest {
  double z = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

// Pooled two-proportion z-test with a two-sided p-value.
inline ZTest two_proportion_ztest(double p1, std::uint64_t n1, double p2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw Error(ErrorCode::kInvalidConfig, "z-test needs n >= 1 on both sides");
  if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1) throw Error(ErrorCode::kInvalidConfig, "proportions must lie in [0,1]");
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double pooled = (p1 * a + p2 * b) / (a + b);
  const double var = pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b);
  if (!(var > 0.0)) return ZTest{0.0, 1.0, true};
  const double z = (p1 - p2) / std::sqrt(var);
  return ZTest{z, std::erfc(std::abs(z) / std::sqrt(2.0)), false};
}

struct ConfigMetrics {
  TrialConfig config;
  std::uint64_t n = 0;
  double precision_at_2 = 0.0;
  double recall_at_4 = 0.0;
};

// DETECT vs. plain for one representation and scoring function. n counts
// intended-word slots (trials x m), the unit the proportions are measured in.
struct DetectComparison {
  std::string representation;
  ScoringFn scoring_fn = ScoringFn::kOurs;
  std::string metric;
  double base = 0.0;
  std::uint64_t base_n = 0;
  double with_detect = 0.0;
  std::uint64_t detect_n = 0;
  ZTest test;
};

struct MetricsReport {
  std::string evaluation = "human";  // or "bot-evaluation"
  std::vector<ConfigMetrics> configs;  // sorted by config
  std::vector<DetectComparison> comparisons;

  const ConfigMetrics* find(const TrialConfig& c) const {
    for (const auto& m : configs) {
      if (m.config == c) return &m;
    }
    return nullptr;
  }
};

inline MetricsReport aggregate(const std::vector<std::pair<TrialResponse, Trial>>& responses,
                               std::string evaluation = "human") {
  struct Bucket {
    std::uint64_t n = 0;
    std::uint64_t slots = 0;
    std::uint64_t hits2 = 0;
    std::uint64_t hits4 = 0;
  };
  std::map<TrialConfig, Bucket> buckets;
  for (const auto& [response, trial] : responses) {
    if (response.trial_id != trial.id) {
      throw Error(ErrorCode::kInvalidResponse, "response for '" + response.trial_id + "' paired with trial '" + trial.id + "'");
    }
    auto m = trial_metrics(response, trial.intended);
    auto& b = buckets[trial.config];
    const auto k = trial.intended.size();
    ++b.n;
    b.slots += k;
    // hit counts are exact integers, so means do not depend on response order
    b.hits2 += static_cast<std::uint64_t>(std::llround(m.precision_at_2 * static_cast<double>(k)));
    b.hits4 += static_cast<std::uint64_t>(std::llround(m.recall_at_4 * static_cast<double>(k)));
  }
  MetricsReport report;
  report.evaluation = std::move(evaluation);
  for (const auto& [config, b] : buckets) {
    report.configs.push_back(ConfigMetrics{config, b.n, static_cast<double>(b.hits2) / static_cast<double>(b.slots),
                                           static_cast<double>(b.hits4) / static_cast<double>(b.slots)});
  }
  for (const auto& [config, b] : buckets) {
    if (config.detect) continue;
    TrialConfig with = config;
    with.detect = true;
    auto it = buckets.find(with);
    if (it == buckets.end()) continue;
    const auto& d = it->second;
    auto compare = [&](const char* metric, std::uint64_t base_hits, std::uint64_t detect_hits) {
      DetectComparison c;
      c.representation = config.representation;
      c.scoring_fn = config.scoring_fn;
      c.metric = metric;
      c.base = static_cast<double>(base_hits) / static_cast<double>(b.slots);
      c.base_n = b.slots;
      c.with_detect = static_cast<double>(detect_hits) / static_cast<double>(d.slots);
      c.detect_n = d.slots;
      c.test = two_proportion_ztest(c.with_detect, c.detect_n, c.base, c.base_n);
      report.comparisons.push_back(c);
    };
    compare("precision@2", b.hits2, d.hits2);
    compare("recall@4", b.hits4, d.hits4);
  }
  return report;
}

// Bot guesser: ranks board words by similarity to the clue (ties and unknown
// words resolved by token order, unknown words last) and answers the top 4.
inline TrialResponse simulate_guesser(const EmbeddingStore& store, const Trial& trial) {
  auto clue_index = store.index_of(trial.clue);
  if (!clue_index) throw Error(ErrorCode::kUnknownClue, "'" + trial.clue.str() + "' not in " + store.name());
  struct Ranked {
    WordToken word;
    bool known;
    double sim;
  };
  std::vector<Ranked> ranked;
  for (const auto& w : trial.board.all_words()) {
    auto i = store.index_of(w);
    ranked.push_back(Ranked{w, i.has_value(), i ? store.cosine(*clue_index, *i) : 0.0});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.known != b.known) return a.known;
    if (a.known && a.sim != b.sim) return a.sim > b.sim;
    return a.word < b.word;
  });
  TrialResponse r;
  r.trial_id = trial.id;
  r.rank1 = ranked.at(0).word;
  r.rank2 = ranked.at(1).word;
  if (ranked.size() > 2) r.rank3 = ranked[2].word;
  if (ranked.size() > 3) r.rank4 = ranked[3].word;
  r.responder_id = "bot:" + store.name();
  return r;
}

// ---- serialization ----

inline nlohmann::json tokens_to_json(const TokenList& tokens) {
  auto arr = nlohmann::json::array();
  for (const auto& t : tokens) arr.push_back(t.str());
  return arr;
}

inline nlohmann::json clue_to_json(const ClueResult& r) {
  const auto& b = r.breakdown;
  return {{"clue", r.clue.str()},
          {"intended", tokens_to_json(r.intended.words())},
          {"score", r.score},
          {"representation", r.representation},
          {"scoringFn", scoring_fn_name(r.scoring_fn)},
          {"detect", r.detect},
          {"singleWordFallback", r.single_word_fallback},
          {"breakdown",
           {{"base", b.base},
            {"freqTerm", b.freq_term},
            {"dictBlueSum", b.dict_blue_sum},
            {"dictRedMax", b.dict_red_max},
            {"detect", b.detect},
            {"total", b.total},
            {"kimConstraintPassed", b.kim_constraint_passed},
            {"relaxed", b.relaxed}}},
          {"provenance", r.provenance}};
}

inline TokenList tokens_from_json(const nlohmann::json& j) {
  TokenList out;
  for (const auto& t : j) out.push_back(WordToken::normalize(t.get<std::string>()));
  return out;
}

inline nlohmann::json config_to_json(const TrialConfig& c) {
  return {{"representation", c.representation}, {"scoringFn", scoring_fn_name(c.scoring_fn)}, {"detect", c.detect}};
}

inline TrialConfig config_from_json(const nlohmann::json& j) {
  return TrialConfig{j.at("representation").get<std::string>(),
                     parse_scoring_fn(j.at("scoringFn").get<std::string>()), j.at("detect").get<bool>()};
}

// Full record including team colors and intended words; never sent to responders.
inline nlohmann::json trial_to_json(const Trial& t) {
  return {{"id", t.id},
          {"blue", tokens_to_json(t.board.blue())},
          {"red", tokens_to_json(t.board.red())},
          {"displayOrder", tokens_to_json(t.display_order)},
          {"clue", t.clue.str()},
          {"intended", tokens_to_json(t.intended.words())},
          {"config", config_to_json(t.config)}};
}

inline Trial trial_from_json(const nlohmann::json& j) {
  try {
    Trial t;
    t.id = j.at("id").get<std::string>();
    t.board = Board(tokens_from_json(j.at("blue")), tokens_from_json(j.at("red")));
    t.display_order = tokens_from_json(j.at("displayOrder"));
    t.clue = WordToken::normalize(j.at("clue").get<std::string>());
    t.intended = IntendedPair(tokens_from_json(j.at("intended")), t.board);
    t.config = config_from_json(j.at("config"));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

inline nlohmann::json response_to_json(const TrialResponse& r) {
  auto opt = [](const std::optional<WordToken>& w) { return w ? nlohmann::json(w->str()) : nlohmann::json(nullptr); };
  return {{"trialId", r.trial_id}, {"rank1", r.rank1.str()}, {"rank2", r.rank2.str()}, {"rank3", opt(r.rank3)},
          {"rank4", opt(r.rank4)},  {"responderId", r.responder_id}, {"timestamp", r.timestamp}};
}

// Missing or empty rank fields become InvalidResponse.
inline TrialResponse response_from_json(const nlohmann::json& j) {
  auto required = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
      throw Error(ErrorCode::kInvalidResponse, std::string(key) + " is required");
    }
    return WordToken::normalize(j[key].get<std::string>());
  };
  auto optional = [&](const char* key) -> std::optional<WordToken> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw Error(ErrorCode::kInvalidResponse, std::string(key) + " must be a string or null");
    auto s = j[key].get<std::string>();
    if (s.empty() || s == "NONE") return std::nullopt;
    return WordToken::normalize(s);
  };
  if (!j.is_object()) throw Error(ErrorCode::kInvalidResponse, "response must be an object");
  TrialResponse r;
  r.trial_id = j.value("trialId", std::string());
  r.rank1 = required("rank1");
  r.rank2 = required("rank2");
  r.rank3 = optional("rank3");
  r.rank4 = optional("rank4");
  r.responder_id = j.value("responderId", std::string());
  r.timestamp = j.value("timestamp", std::int64_t{0});
  return r;
}

inline std::vector<TrialResponse> read_responses(std::istream& in) {
  std::vector<TrialResponse> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(response_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

inline std::vector<Trial> read_trials(std::istream& in) {
  std::vector<Trial> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(trial_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

// Joins responses to trials by id; unknown ids are an error.
inline std::vector<std::pair<TrialResponse, Trial>> join_responses(const std::vector<TrialResponse>& responses,
                                                                   const std::vector<Trial>& trials) {
  std::map<std::string, const Trial*> by_id;
  for (const auto& t : trials) by_id[t.id] = &t;
  std::vector<std::pair<TrialResponse, Trial>> out;
  for (const auto& r : responses) {
    auto it = by_id.find(r.trial_id);
    if (it == by_id.end()) throw Error(ErrorCode::kInvalidResponse, "no trial '" + r.trial_id + "'");
    out.emplace_back(r, *it->second);
  }
  return out;
}

inline nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["evaluation"] = report.evaluation;
  j["configs"] = nlohmann::json::array();
  for (const auto& c : report.configs) {
    j["configs"].push_back({{"config", config_to_json(c.config)},
                            {"name", c.config.name()},
                            {"n", c.n},
                            {"precisionAt2", c.precision_at_2},
                            {"recallAt4", c.recall_at_4}});
  }
  j["detectComparisons"] = nlohmann::json::array();
  for (const auto& c : report.comparisons) {
    j["detectComparisons"].push_back({{"representation", c.representation},
                                      {"scoringFn", scoring_fn_name(c.scoring_fn)},
                                      {"metric", c.metric},
                                      {"base", c.base},
                                      {"baseN", c.base_n},
                                      {"withDetect", c.with_detect},
                                      {"detectN", c.detect_n},
                                      {"z", c.test.z},
                                      {"pValue", c.test.p_value},
                                      {"degenerate", c.test.degenerate}});
  }
  return j;
}

// Plain-text table: one row per representation (with and without DETECT),
// precision@2 / recall@4 / n for each scoring function. '*' marks a DETECT
// row significantly different from its base row (p < 0.05).
inline std::string render_report_table(const MetricsReport& report) {
  std::set<std::string> rows;
  for (const auto& c : report.configs) rows.insert(c.config.representation);
  auto significant = [&](const std::string& rep, ScoringFn fn, const std::string& metric) {
    for (const auto& c : report.comparisons) {
      if (c.representation == rep && c.scoring_fn == fn && c.metric == metric) {
        return !c.test.degenerate && c.test.p_value < 0.05;
      }
    }
    return false;
  };
  std::ostringstream out;
  char buf[128];
  out << "evaluation: " << report.evaluation << '\n';
  std::snprintf(buf, sizeof buf, "%-28s | %-22s | %-22s\n", "", "g", "g_kim");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-28s | %-7s %-7s %-6s | %-7s %-7s %-6s\n", "representation", "P@2", "R@4", "n",
                "P@2", "R@4", "n");
  out << buf;
  if (rows.empty()) {
    out << "(no responses)\n";
    return out.str();
  }
  for (const auto& rep : rows) {
    for (bool detect : {false, true}) {
      std::string line;
      std::snprintf(buf, sizeof buf, "%-28s", (rep + (detect ? "+DETECT" : "")).c_str());
      line += buf;
      bool any = false;
      for (auto fn : {ScoringFn::kOurs, ScoringFn::kKim}) {
        const auto* m = report.find(TrialConfig{rep, fn, detect});
        if (!m) {
          std::snprintf(buf, sizeof buf, " | %-7s %-7s %-6s", "-", "-", "-");
        } else {
          any = true;
          auto cell = [&](double v, const char* metric) {
            char c[16];
            std::snprintf(c, sizeof c, "%.3f%s", v, detect && significant(rep, fn, metric) ? "*" : "");
            return std::string(c);
          };
          std::snprintf(buf, sizeof buf, " | %-7s %-7s %-6llu", cell(m->precision_at_2, "precision@2").c_str(),
                        cell(m->recall_at_4, "recall@4").c_str(), static_cast<unsigned long long>(m->n));
        }
        line += buf;
      }
      if (any) out << line << '\n';
    }
  }
  return out.str();
}

}  // namespace codenames
