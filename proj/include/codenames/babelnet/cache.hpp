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
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "codenames/babelnet/graph.hpp"
#include "codenames/error.hpp"
#include "codenames/io.hpp"

namespace codenames::babelnet {

using nlohmann::json;

inline json synset_to_json(const Synset& s) {
  json j = {{"record", "synset"},
            {"id", s.id},
            {"mainSense", s.main_sense},
            {"otherSenses", s.other_senses},
            {"pos", s.pos}};
  j["definition"] = s.definition ? json(*s.definition) : json(nullptr);
  return j;
}

inline Synset synset_from_json(const json& j) {
  try {
    Synset s;
    s.id = j.at("id").get<std::string>();
    s.main_sense = j.at("mainSense").get<std::string>();
    s.other_senses = j.value("otherSenses", std::vector<std::string>{});
    s.pos = j.value("pos", std::string());
    if (j.contains("definition") && !j["definition"].is_null()) {
      s.definition = j["definition"].get<std::string>();
    }
    if (s.id.empty() || s.main_sense.empty()) {
      throw Error(ErrorCode::kMalformedRecord, "synset record needs id and mainSense");
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

inline json edge_to_json(const Edge& e) {
  return json{{"record", "edge"},
              {"source", e.source},
              {"target", e.target},
              {"relationName", e.relation_name},
              {"relationGroup", relation_group_name(e.group)},
              {"isAutomatic", e.automatic}};
}

// Edges without a relationGroup field are classified by name.
inline Edge edge_from_json(const json& j, const RelationClassifier& classifier = {}) {
  try {
    auto relation = j.at("relationName").get<std::string>();
    Edge e = make_edge(j.at("source").get<std::string>(), j.at("target").get<std::string>(),
                       relation, j.value("isAutomatic", false), classifier);
    if (j.contains("relationGroup")) e.group = parse_relation_group(j["relationGroup"].get<std::string>());
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kMalformedRecord, ex.what());
  }
}

// One record per line: synset records (lemma synsets flagged), edge records
// with their level, and a closing "end" marker carrying the completeness flag.
inline void write_subgraph(const CachedSubgraph& g, std::ostream& out) {
  for (const auto& id : g.lemma_synsets) {
    auto j = synset_to_json(g.synsets.at(id));
    j["lemma"] = true;
    out << j.dump() << '\n';
  }
  for (const auto& [id, s] : g.synsets) {
    if (std::find(g.lemma_synsets.begin(), g.lemma_synsets.end(), id) != g.lemma_synsets.end()) continue;
    out << synset_to_json(s).dump() << '\n';
  }
  for (const auto& [key, list] : g.edges) {
    for (const auto& e : list) {
      auto j = edge_to_json(e);
      j["level"] = key.second;
      out << j.dump() << '\n';
    }
  }
  out << json{{"record", "end"}, {"word", g.word.str()}, {"levels", g.levels}, {"complete", g.complete}}.dump()
      << '\n';
}

inline CachedSubgraph read_subgraph(std::istream& in) {
  CachedSubgraph g;
  bool ended = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (ended) throw Error(ErrorCode::kMalformedRecord, "records after end marker");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": " + e.what());
    }
    auto kind = j.value("record", std::string());
    if (kind == "synset") {
      auto s = synset_from_json(j);
      if (j.value("lemma", false)) g.lemma_synsets.push_back(s.id);
      g.synsets[s.id] = std::move(s);
    } else if (kind == "edge") {
      auto level = j.at("level").get<std::size_t>();
      auto e = edge_from_json(j);
      g.edges[{e.source, level}].push_back(std::move(e));
    } else if (kind == "end") {
      g.word = WordToken::normalize(j.at("word").get<std::string>());
      g.levels = j.at("levels").get<std::size_t>();
      g.complete = j.at("complete").get<bool>();
      ended = true;
    } else {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": unknown record");
    }
  }
  if (!ended) throw Error(ErrorCode::kMalformedRecord, "missing end marker (truncated record?)");
  for (const auto& [key, _] : g.edges) {
    if (key.second == 0 || key.second > g.levels) {
      throw Error(ErrorCode::kMalformedRecord, "edge level out of range");
    }
  }
  return g;
}

// Escapes a token into a portable file name.
inline std::string cache_file_stem(const WordToken& w) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : w.str()) {
    if (std::isalnum(c) || c == '_' || c == '-' || c >= 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

// Directory of per-word subgraph records, one file per normalized token.
class SubgraphCache {
 public:
  explicit SubgraphCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }

  std::filesystem::path path_for(const WordToken& w) const {
    return dir_ / (cache_file_stem(w) + ".jsonl");
  }

  std::optional<CachedSubgraph> load(const WordToken& w) const {
    auto p = path_for(w);
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    return read_subgraph(in);
  }

  void store(const CachedSubgraph& g) {
    std::ostringstream ss;
    write_subgraph(g, ss);
    std::lock_guard lock(word_mutex(g.word));
    atomic_write(path_for(g.word), ss.str());
  }

 private:
  std::mutex& word_mutex(const WordToken& w) {
    std::lock_guard lock(map_mutex_);
    auto& m = locks_[w.str()];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  std::filesystem::path dir_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace codenames::babelnet
