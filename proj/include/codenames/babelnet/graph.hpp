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
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "codenames/core.hpp"
#include "codenames/error.hpp"

namespace codenames::babelnet {

enum class RelationGroup { kHypernym, kOther };

inline std::string_view relation_group_name(RelationGroup g) {
  return g == RelationGroup::kHypernym ? "HYPERNYM" : "OTHER";
}

inline RelationGroup parse_relation_group(std::string_view s) {
  if (s == "HYPERNYM") return RelationGroup::kHypernym;
  if (s == "OTHER") return RelationGroup::kOther;
  throw Error(ErrorCode::kMalformedRecord, "unknown relation group '" + std::string(s) + "'");
}

// Maps relation names onto groups. Configuration rather than code so a
// renamed relation only needs a config change.
class RelationClassifier {
 public:
  RelationClassifier() : hypernyms_{"is-a", "subclass-of"} {}
  explicit RelationClassifier(std::set<std::string> hypernym_names)
      : hypernyms_(std::move(hypernym_names)) {}

  RelationGroup classify(std::string_view relation_name) const {
    return hypernyms_.count(std::string(relation_name)) ? RelationGroup::kHypernym
                                                        : RelationGroup::kOther;
  }
  const std::set<std::string>& hypernym_names() const noexcept { return hypernyms_; }

 private:
  std::set<std::string> hypernyms_;
};

struct Synset {
  std::string id;
  std::string main_sense;
  std::vector<std::string> other_senses;
  std::string pos;
  std::optional<std::string> definition;

  friend bool operator==(const Synset&, const Synset&) = default;
};

struct Edge {
  std::string source;
  std::string target;
  std::string relation_name;
  RelationGroup group = RelationGroup::kOther;
  bool automatic = false;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(std::string source, std::string target, std::string relation, bool automatic,
                      const RelationClassifier& classifier = {}) {
  if (source == target) throw Error(ErrorCode::kMalformedRecord, "self-loop edge on " + source);
  auto group = classifier.classify(relation);
  return Edge{std::move(source), std::move(target), std::move(relation), group, automatic};
}

inline constexpr std::size_t kDefaultLevels = 3;

struct GraphPath {
  WordToken origin;
  std::string origin_synset;
  std::vector<Edge> edges;

  std::size_t length() const noexcept { return edges.size(); }
  const std::string& terminal() const { return edges.empty() ? origin_synset : edges.back().target; }
};

// A traversal is usable when no edge is automatic, every edge after the first
// is a hypernym, those later edges all share one relation name, and the path
// is at most max_length edges. The first edge may be any relation.
inline bool validate_path(const GraphPath& path, std::size_t max_length = kDefaultLevels) {
  if (path.edges.size() > max_length) return false;
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const Edge& e = path.edges[i];
    if (e.automatic) return false;
    if (i > 0 && path.edges[i - 1].target != e.source) return false;
    if (i == 0) continue;
    if (e.group != RelationGroup::kHypernym) return false;
    if (e.relation_name != path.edges[1].relation_name) return false;
  }
  return true;
}

struct LabelWeights {
  double w1 = 1.0;  // main sense, single word
  double w2 = 1.1;  // main sense, word of a multi-word label
  double w3 = 1.1;  // other sense, single word
  double w4 = 1.2;  // other sense, word of a multi-word label

  void validate() const {
    if (!(w1 > 0 && w1 <= w2 && w2 <= w3 && w3 <= w4)) {
      throw Error(ErrorCode::kInvalidConfig, "label weights must satisfy 0 < w1 <= w2 <= w3 <= w4");
    }
  }
  friend bool operator==(const LabelWeights&, const LabelWeights&) = default;
};

enum class LabelMode {
  kOverwrite,  // later assignments replace earlier ones
  kMinWeight,  // keep the smallest weight seen per word
};

namespace detail {

inline std::vector<std::string> split_label(std::string_view label) {
  std::vector<std::string> words;
  std::string normalized;
  try {
    normalized = WordToken::normalize(label).str();
  } catch (const Error&) {
    return words;
  }
  std::size_t start = 0;
  while (start <= normalized.size()) {
    auto cut = normalized.find('_', start);
    auto piece = normalized.substr(start, cut == std::string::npos ? std::string::npos : cut - start);
    if (!piece.empty()) words.push_back(std::move(piece));
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return words;
}

}  // namespace detail

using LabelMap = std::map<WordToken, double>;

// Splits a synset's labels into single words and weights each one by label
// kind: w1/w2 for the main sense (single/multi word), w3/w4 for other senses.
// Words are written in label order, so in kOverwrite mode a word that appears
// in several labels ends up with the weight of the last label containing it.
inline LabelMap extract_single_word_labels(std::string_view main_sense,
                                           const std::vector<std::string>& other_senses,
                                           const LabelWeights& weights = {},
                                           LabelMode mode = LabelMode::kOverwrite) {
  LabelMap labels;
  auto assign = [&](const std::string& word, double w) {
    auto token = WordToken::normalize(word);
    auto [it, inserted] = labels.emplace(token, w);
    if (inserted) return;
    it->second = mode == LabelMode::kOverwrite ? w : std::min(it->second, w);
  };
  auto main_words = detail::split_label(main_sense);
  if (main_words.size() == 1) {
    assign(main_words[0], weights.w1);
  } else {
    for (const auto& word : main_words) assign(word, weights.w2);
  }
  for (const auto& sense : other_senses) {
    auto words = detail::split_label(sense);
    if (words.size() == 1) {
      assign(words[0], weights.w3);
    } else {
      for (const auto& word : words) assign(word, weights.w4);
    }
  }
  return labels;
}

// 1 / (weight * h + 1): the inverse path length with the label weight applied
// to the edge count.
inline double path_similarity(std::size_t h, double label_weight) {
  return 1.0 / (label_weight * static_cast<double>(h) + 1.0);
}

// Edges fetched for one board word, keyed by (synset, level) exactly as they
// were retrieved, plus the synset records needed to label every node.
struct CachedSubgraph {
  WordToken word;
  std::size_t levels = kDefaultLevels;
  std::vector<std::string> lemma_synsets;
  std::map<std::string, Synset> synsets;
  std::map<std::pair<std::string, std::size_t>, std::vector<Edge>> edges;
  bool complete = false;

  friend bool operator==(const CachedSubgraph&, const CachedSubgraph&) = default;
};

struct GraphNeighbor {
  WordToken token;
  std::size_t path_length = 0;
  double label_weight = 1.0;
  GraphPath provenance;

  double similarity() const { return path_similarity(path_length, label_weight); }
};

namespace detail {

// Outgoing edges per synset, merged across levels and de-duplicated.
inline std::map<std::string, std::vector<Edge>> adjacency(const CachedSubgraph& g) {
  std::map<std::string, std::vector<Edge>> adj;
  for (const auto& [key, list] : g.edges) {
    auto& out = adj[key.first];
    for (const auto& e : list) {
      if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
  }
  return adj;
}

}  // namespace detail

// Shortest valid path from any of the word's synsets to every reachable
// synset. Paths are enumerated breadth-first in (lemma synset, stored edge)
// order, so the first path found for a synset is a shortest one and the choice
// among equally short paths is deterministic.
inline std::map<std::string, GraphPath> shortest_valid_paths(const CachedSubgraph& g) {
  if (!g.complete) {
    throw Error(ErrorCode::kIncompleteCache, "subgraph for '" + g.word.str() + "' is incomplete");
  }
  auto adj = detail::adjacency(g);
  std::map<std::string, GraphPath> best;
  std::vector<GraphPath> frontier;
  for (const auto& id : g.lemma_synsets) {
    GraphPath p{g.word, id, {}};
    if (best.emplace(id, p).second) frontier.push_back(std::move(p));
  }
  // Later lemma synsets may re-seed a synset already seen; the frontier keeps
  // every distinct origin so longer extensions remain reachable.
  for (std::size_t depth = 0; depth < g.levels; ++depth) {
    std::vector<GraphPath> next;
    for (const auto& path : frontier) {
      auto it = adj.find(path.terminal());
      if (it == adj.end()) continue;
      for (const auto& e : it->second) {
        bool revisits = e.target == path.origin_synset ||
                        std::any_of(path.edges.begin(), path.edges.end(),
                                    [&](const Edge& x) { return x.target == e.target; });
        if (revisits) continue;
        GraphPath extended = path;
        extended.edges.push_back(e);
        if (!validate_path(extended, g.levels)) continue;
        best.emplace(e.target, extended);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  return best;
}

// One neighbor per (reachable synset, extracted label word).
inline std::vector<GraphNeighbor> graph_neighbors(const CachedSubgraph& g, const LabelWeights& weights = {},
                                                  LabelMode mode = LabelMode::kOverwrite) {
  std::vector<GraphNeighbor> out;
  for (const auto& [id, path] : shortest_valid_paths(g)) {
    auto it = g.synsets.find(id);
    if (it == g.synsets.end()) continue;
    for (const auto& [token, w] : extract_single_word_labels(it->second.main_sense,
                                                             it->second.other_senses, weights, mode)) {
      out.push_back(GraphNeighbor{token, path.length(), w, path});
    }
  }
  return out;
}

// Collapses neighbors to one representative per token: minimum path length,
// then minimum label weight.
inline std::map<WordToken, GraphNeighbor> best_neighbors(const std::vector<GraphNeighbor>& neighbors) {
  std::map<WordToken, GraphNeighbor> best;
  for (const auto& n : neighbors) {
    auto [it, inserted] = best.emplace(n.token, n);
    if (inserted) continue;
    auto& cur = it->second;
    if (n.path_length < cur.path_length ||
        (n.path_length == cur.path_length && n.label_weight < cur.label_weight)) {
      cur = n;
    }
  }
  return best;
}

}  // namespace codenames::babelnet
