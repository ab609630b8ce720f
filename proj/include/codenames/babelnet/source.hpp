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
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codenames/babelnet/cache.hpp"
#include "codenames/babelnet/graph.hpp"
#include "codenames/core.hpp"
#include "codenames/error.hpp"

namespace codenames::babelnet {

// Read access to a synset graph: lemma lookup, synset records and outgoing
// edges. Implemented by the HTTP client and by in-memory fixtures.
class GraphSource {
 public:
  virtual ~GraphSource() = default;
  virtual std::vector<std::string> synset_ids(const WordToken& lemma) = 0;
  virtual Synset synset(const std::string& id) = 0;
  virtual std::vector<Edge> outgoing_edges(const std::string& id) = 0;
};

// In-memory graph, typically loaded from a fixture file. Counts calls so tests
// can verify cache hits.
class FixtureGraph : public GraphSource {
 public:
  void add_lemma(const WordToken& word, std::vector<std::string> ids) { lemmas_[word] = std::move(ids); }
  void add_synset(Synset s) { synsets_[s.id] = std::move(s); }
  void add_edge(Edge e) { edges_[e.source].push_back(std::move(e)); }

  std::vector<std::string> synset_ids(const WordToken& lemma) override {
    ++calls_;
    auto it = lemmas_.find(lemma);
    return it == lemmas_.end() ? std::vector<std::string>{} : it->second;
  }

  Synset synset(const std::string& id) override {
    ++calls_;
    auto it = synsets_.find(id);
    if (it == synsets_.end()) throw Error(ErrorCode::kUnknownToken, "no synset " + id);
    return it->second;
  }

  std::vector<Edge> outgoing_edges(const std::string& id) override {
    ++calls_;
    auto it = edges_.find(id);
    return it == edges_.end() ? std::vector<Edge>{} : it->second;
  }

  std::size_t calls() const noexcept { return calls_; }

 private:
  std::map<WordToken, std::vector<std::string>> lemmas_;
  std::map<std::string, Synset> synsets_;
  std::map<std::string, std::vector<Edge>> edges_;
  std::size_t calls_ = 0;
};

// Fixture format: JSON lines of {"record":"lemma","word":..,"synsets":[..]},
// synset records and edge records (relationGroup optional).
inline std::unique_ptr<FixtureGraph> load_fixture_graph(std::istream& in,
                                                        const RelationClassifier& classifier = {}) {
  auto graph = std::make_unique<FixtureGraph>();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": " + e.what());
    }
    auto kind = j.value("record", std::string());
    if (kind == "lemma") {
      graph->add_lemma(WordToken::normalize(j.at("word").get<std::string>()),
                       j.at("synsets").get<std::vector<std::string>>());
    } else if (kind == "synset") {
      graph->add_synset(synset_from_json(j));
    } else if (kind == "edge") {
      graph->add_edge(edge_from_json(j, classifier));
    } else {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": unknown record");
    }
  }
  return graph;
}

inline std::unique_ptr<FixtureGraph> load_fixture_graph(const std::filesystem::path& path,
                                                        const RelationClassifier& classifier = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return load_fixture_graph(in, classifier);
}

// Persists every answer from an upstream source under <dir>/_responses so a
// repeated lookup never reaches the upstream again.
class CachingGraphSource : public GraphSource {
 public:
  CachingGraphSource(std::shared_ptr<GraphSource> upstream, std::filesystem::path dir)
      : upstream_(std::move(upstream)), dir_(std::move(dir) / "_responses") {}

  std::vector<std::string> synset_ids(const WordToken& lemma) override {
    auto path = dir_ / "lemmas" / (cache_file_stem(lemma) + ".json");
    if (auto j = read(path)) return j->get<std::vector<std::string>>();
    auto ids = require_upstream().synset_ids(lemma);
    atomic_write(path, nlohmann::json(ids).dump());
    return ids;
  }

  Synset synset(const std::string& id) override {
    auto path = dir_ / "synsets" / (file_stem(id) + ".json");
    if (auto j = read(path)) return synset_from_json(*j);
    auto s = require_upstream().synset(id);
    atomic_write(path, synset_to_json(s).dump());
    return s;
  }

  std::vector<Edge> outgoing_edges(const std::string& id) override {
    auto path = dir_ / "edges" / (file_stem(id) + ".json");
    if (auto j = read(path)) {
      std::vector<Edge> edges;
      for (const auto& e : *j) edges.push_back(edge_from_json(e));
      return edges;
    }
    auto edges = require_upstream().outgoing_edges(id);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : edges) arr.push_back(edge_to_json(e));
    atomic_write(path, arr.dump());
    return edges;
  }

 private:
  static std::string file_stem(const std::string& id) {
    std::string out;
    for (char c : id) out.push_back(c == ':' || c == '/' ? '_' : c);
    return out;
  }

  static std::optional<nlohmann::json> read(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) return std::nullopt;
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord, p.string() + ": " + e.what());
    }
  }

  GraphSource& require_upstream() {
    if (!upstream_) throw Error(ErrorCode::kMissingKey, "no upstream source and response not cached");
    return *upstream_;
  }

  std::shared_ptr<GraphSource> upstream_;
  std::filesystem::path dir_;
};

// Synsets whose lemmas include `word`. An empty list is a valid answer.
inline std::vector<Synset> fetch_synsets(const WordToken& word, GraphSource& source) {
  std::vector<Synset> out;
  for (const auto& id : source.synset_ids(word)) out.push_back(source.synset(id));
  return out;
}

// Level 1 stores every outgoing edge of the word's synsets; each later level
// fetches the outgoing edges of targets reached through non-automatic
// hypernym edges of the previous level. `partial` always holds what was
// retrieved so far, so a caller can persist it if the source fails midway.
inline void query_word_edges(const WordToken& word, const std::vector<Synset>& lemma_synsets,
                             std::size_t levels, GraphSource& source, CachedSubgraph& partial) {
  if (levels == 0) throw Error(ErrorCode::kInvalidConfig, "levels must be at least 1");
  partial = CachedSubgraph{};
  partial.word = word;
  partial.levels = levels;
  std::vector<std::string> synsets;
  for (const auto& s : lemma_synsets) {
    if (partial.synsets.emplace(s.id, s).second) {
      partial.lemma_synsets.push_back(s.id);
      synsets.push_back(s.id);
    }
  }
  for (std::size_t level = 1; level <= levels; ++level) {
    std::vector<std::string> next;
    std::set<std::string> queued;
    for (const auto& id : synsets) {
      auto edges = source.outgoing_edges(id);
      for (const auto& e : edges) {
        if (!e.automatic && e.group == RelationGroup::kHypernym && queued.insert(e.target).second) {
          next.push_back(e.target);
        }
      }
      if (!edges.empty()) partial.edges[{id, level}] = std::move(edges);
    }
    synsets = std::move(next);
  }
  // Label records for every synset an edge points at.
  for (const auto& [key, list] : partial.edges) {
    for (const auto& e : list) {
      if (!partial.synsets.count(e.target)) partial.synsets.emplace(e.target, source.synset(e.target));
    }
  }
  partial.complete = true;
}

// Runs the edge query for every word of the board and returns one subgraph per
// word.
inline std::map<WordToken, CachedSubgraph> query_edges(
    const std::map<WordToken, std::vector<Synset>>& lemma_synsets, const Board& board,
    std::size_t levels, GraphSource& source) {
  std::map<WordToken, CachedSubgraph> out;
  for (const auto& word : board.all_words()) {
    auto it = lemma_synsets.find(word);
    static const std::vector<Synset> kNone;
    CachedSubgraph g;
    query_word_edges(word, it == lemma_synsets.end() ? kNone : it->second, levels, source, g);
    out.emplace(word, std::move(g));
  }
  return out;
}

// Returns the cached subgraph for `word`, building and persisting it first if
// it is missing or incomplete. Failures persist the partial subgraph (marked
// incomplete) before propagating.
inline CachedSubgraph ensure_cached(const WordToken& word, std::size_t levels, GraphSource& source,
                                    SubgraphCache& cache) {
  if (auto existing = cache.load(word); existing && existing->complete && existing->levels >= levels) {
    return *existing;
  }
  CachedSubgraph g;
  g.word = word;
  g.levels = levels;
  try {
    auto synsets = fetch_synsets(word, source);
    query_word_edges(word, synsets, levels, source, g);
  } catch (...) {
    g.complete = false;
    cache.store(g);
    throw;
  }
  cache.store(g);
  return g;
}

}  // namespace codenames::babelnet
