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

#include <functional>
#include <map>

#include "codenames/babelnet/graph.hpp"
#include "codenames/babelnet/source.hpp"
#include "codenames/rng.hpp"
#include "support/fixtures.hpp"
#include "support/graph_fixtures.hpp"

namespace codenames::babelnet {
namespace {

using codenames::testing::tok;

Edge edge(std::string s, std::string t, std::string rel, bool automatic = false) {
  return make_edge(std::move(s), std::move(t), std::move(rel), automatic);
}

GraphPath path(std::string origin, std::vector<Edge> edges) {
  return GraphPath{tok("w"), std::move(origin), std::move(edges)};
}

TEST(RelationClassifier, DefaultGroups) {
  RelationClassifier c;
  EXPECT_EQ(c.classify("is-a"), RelationGroup::kHypernym);
  EXPECT_EQ(c.classify("subclass-of"), RelationGroup::kHypernym);
  EXPECT_EQ(c.classify("has-part"), RelationGroup::kOther);
  RelationClassifier custom({"hypernym"});
  EXPECT_EQ(custom.classify("hypernym"), RelationGroup::kHypernym);
  EXPECT_EQ(custom.classify("is-a"), RelationGroup::kOther);
}

TEST(RelationClassifier, SelfLoopIsMalformed) {
  EXPECT_THROW(edge("a", "a", "is-a"), Error);
}

TEST(ValidatePath, WorkedExamples) {
  EXPECT_TRUE(validate_path(path("needle", {edge("needle", "point", "has-part")})));
  EXPECT_FALSE(validate_path(
      path("needle", {edge("needle", "point", "has-part"), edge("point", "spearhead", "has-kind")})));
  EXPECT_FALSE(validate_path(path("litter", {edge("litter", "animal_group", "is-a"),
                                             edge("animal_group", "fauna", "subclass-of"),
                                             edge("fauna", "aggregation", "is-a")})));
}

TEST(ValidatePath, ConstraintTableRows) {
  auto graph = codenames::testing::load_graph("constraint_graph.jsonl");
  auto rows = codenames::testing::load_constraint_rows();
  ASSERT_EQ(rows.size(), 13u);
  for (const auto& row : rows) {
    auto p = codenames::testing::path_from_nodes(*graph, row.nodes);
    EXPECT_EQ(validate_path(p), row.expected_pass) << row.nodes.front() << " -> " << p.terminal();
  }
}

TEST(ValidatePath, AutomaticLengthAndEmpty) {
  EXPECT_TRUE(validate_path(path("a", {})));
  EXPECT_FALSE(validate_path(path("a", {edge("a", "b", "is-a", true)})));
  EXPECT_FALSE(validate_path(path("a", {edge("a", "b", "gloss-related"), edge("b", "c", "is-a", true)})));
  std::vector<Edge> four{edge("a", "b", "is-a"), edge("b", "c", "is-a"), edge("c", "d", "is-a"),
                         edge("d", "e", "is-a")};
  EXPECT_FALSE(validate_path(path("a", four)));
  EXPECT_TRUE(validate_path(path("a", four), 4));
  EXPECT_TRUE(validate_path(path("a", {edge("a", "b", "gloss-related"), edge("b", "c", "is-a")})));
}

TEST(ExtractLabels, AlgorithmTraces) {
  EXPECT_EQ(extract_single_word_labels("opera", {}), (LabelMap{{tok("opera"), 1.0}}));
  EXPECT_EQ(extract_single_word_labels("stringed_instrument", {"string_instrument", "chordophone"}),
            (LabelMap{{tok("stringed"), 1.1}, {tok("instrument"), 1.2}, {tok("string"), 1.2},
                      {tok("chordophone"), 1.1}}));
  EXPECT_EQ(extract_single_word_labels("bedding", {"litter", "bedding_material"}),
            (LabelMap{{tok("bedding"), 1.2}, {tok("litter"), 1.1}, {tok("material"), 1.2}}));
}

TEST(ExtractLabels, MinWeightModeDiffersOnlyOnReassignedWords) {
  const auto mode = LabelMode::kMinWeight;
  EXPECT_EQ(extract_single_word_labels("opera", {}, {}, mode), (LabelMap{{tok("opera"), 1.0}}));
  EXPECT_EQ(extract_single_word_labels("stringed_instrument", {"string_instrument", "chordophone"}, {}, mode),
            (LabelMap{{tok("stringed"), 1.1}, {tok("instrument"), 1.1}, {tok("string"), 1.2},
                      {tok("chordophone"), 1.1}}));
  EXPECT_EQ(extract_single_word_labels("bedding", {"litter", "bedding_material"}, {}, mode),
            (LabelMap{{tok("bedding"), 1.0}, {tok("litter"), 1.1}, {tok("material"), 1.2}}));
}

TEST(ExtractLabels, CustomWeights) {
  LabelWeights w{1, 2, 3, 4};
  EXPECT_EQ(extract_single_word_labels("musical_composition", {"opus"}, w),
            (LabelMap{{tok("musical"), 2}, {tok("composition"), 2}, {tok("opus"), 3}}));
  EXPECT_THROW((LabelWeights{1, 1.2, 1.1, 1.3}.validate()), Error);
  EXPECT_NO_THROW(LabelWeights{}.validate());
}

// Sequential replay of the label writes, one dictionary assignment at a time.
LabelMap replay(const std::string& main, const std::vector<std::string>& others, const LabelWeights& w) {
  std::vector<std::pair<std::string, double>> writes;
  auto words = [](const std::string& label) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : label) {
      if (c == '_') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  auto m = words(main);
  for (const auto& x : m) writes.emplace_back(x, m.size() == 1 ? w.w1 : w.w2);
  for (const auto& o : others) {
    auto ws = words(o);
    for (const auto& x : ws) writes.emplace_back(x, ws.size() == 1 ? w.w3 : w.w4);
  }
  LabelMap out;
  for (const auto& [x, weight] : writes) out[tok(x)] = weight;
  return out;
}

TEST(ExtractLabels, OverwriteModeMatchesSequentialReplay) {
  SeededRng rng(17);
  const std::vector<std::string> vocab{"band", "music", "group", "scale", "opera", "piece", "work", "art"};
  auto label = [&] {
    std::string s = vocab[rng.below(vocab.size())];
    std::size_t extra = rng.below(3);
    for (std::size_t i = 0; i < extra; ++i) s += "_" + vocab[rng.below(vocab.size())];
    return s;
  };
  for (int trial = 0; trial < 2000; ++trial) {
    std::string main = label();
    std::vector<std::string> others(rng.below(4));
    for (auto& o : others) o = label();
    EXPECT_EQ(extract_single_word_labels(main, others), replay(main, others, {})) << main;
    auto min_mode = extract_single_word_labels(main, others, {}, LabelMode::kMinWeight);
    auto overwrite = extract_single_word_labels(main, others);
    ASSERT_EQ(min_mode.size(), overwrite.size());
    for (const auto& [t, w] : min_mode) EXPECT_LE(w, overwrite.at(t));
  }
}

TEST(PathSimilarity, WorkedValues) {
  EXPECT_EQ(path_similarity(0, 1.2), 1.0);
  EXPECT_DOUBLE_EQ(path_similarity(2, 1.0), 1.0 / 3.0);
  EXPECT_NEAR(path_similarity(1, 1.2), 0.45455, 1e-5);
}

TEST(PathSimilarity, BoundedAndMonotone) {
  const std::vector<double> weights{1.0, 1.1, 1.2, 2.5};
  for (std::size_t h = 0; h <= 6; ++h) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const double s = path_similarity(h, weights[i]);
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
      EXPECT_EQ(s == 1.0, h == 0);
      EXPECT_LT(path_similarity(h + 1, weights[i]), s);
      if (h >= 1 && i + 1 < weights.size()) {
        EXPECT_LT(path_similarity(h, weights[i + 1]), s);
      }
    }
  }
}

CachedSubgraph musical(const std::string& word) {
  auto graph = codenames::testing::load_graph("musical_graph.jsonl");
  CachedSubgraph g;
  query_word_edges(tok(word), fetch_synsets(tok(word), *graph), kDefaultLevels, *graph, g);
  return g;
}

TEST(GraphNeighbors, OperaReachesMusical) {
  auto best = best_neighbors(graph_neighbors(musical("opera")));
  ASSERT_TRUE(best.count(tok("musical")));
  const auto& n = best.at(tok("musical"));
  EXPECT_EQ(n.path_length, 1u);
  EXPECT_EQ(n.label_weight, 1.1);
  EXPECT_EQ(n.provenance.terminal(), "bn:17306106n");
  EXPECT_EQ(best.at(tok("opera")).path_length, 0u);
  EXPECT_EQ(best.at(tok("opera")).label_weight, 1.0);
}

TEST(GraphNeighbors, ScaleReachesMusicalThroughItsOwnSense) {
  auto best = best_neighbors(graph_neighbors(musical("scale")));
  EXPECT_EQ(best.at(tok("musical")).path_length, 0u);
  EXPECT_EQ(best.at(tok("musical")).label_weight, 1.2);
  EXPECT_EQ(best.at(tok("scale")).label_weight, 1.2);
}

TEST(GraphNeighbors, AutomaticEdgesAreExcluded) {
  auto best = best_neighbors(graph_neighbors(musical("bank")));
  EXPECT_FALSE(best.count(tok("drama")));
  EXPECT_TRUE(best.count(tok("bank")));
}

TEST(GraphNeighbors, IncompleteSubgraphIsRejected) {
  auto g = musical("opera");
  g.complete = false;
  try {
    graph_neighbors(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteCache);
  }
}

TEST(GraphNeighbors, ShortestOfTwoValidPaths) {
  CachedSubgraph g;
  g.word = tok("root");
  g.lemma_synsets = {"r"};
  g.levels = 3;
  for (const char* id : {"r", "a", "b", "c", "t"}) g.synsets[id] = Synset{id, std::string("n") + id, {}, "NOUN", {}};
  g.edges[{"r", 1}] = {edge("r", "a", "is-a"), edge("r", "c", "has-part")};
  g.edges[{"a", 2}] = {edge("a", "b", "is-a")};
  g.edges[{"c", 2}] = {edge("c", "t", "is-a")};
  g.edges[{"b", 3}] = {edge("b", "t", "is-a")};
  g.complete = true;
  auto paths = shortest_valid_paths(g);
  EXPECT_EQ(paths.at("t").length(), 2u);
  EXPECT_EQ(paths.at("r").length(), 0u);
}

TEST(QueryEdges, HypernymFilterHandTrace) {
  FixtureGraph graph;
  graph.add_lemma(tok("w"), {"s"});
  for (const char* id : {"s", "x", "y", "x2", "y2"}) graph.add_synset(Synset{id, id, {}, "NOUN", {}});
  graph.add_edge(edge("s", "x", "is-a"));
  graph.add_edge(edge("s", "y", "related", true));
  graph.add_edge(edge("x", "x2", "is-a"));
  graph.add_edge(edge("y", "y2", "is-a"));

  CachedSubgraph g;
  query_word_edges(tok("w"), fetch_synsets(tok("w"), graph), 3, graph, g);
  ASSERT_TRUE(g.complete);
  EXPECT_EQ(g.edges.at({"s", 1}).size(), 2u);
  EXPECT_TRUE(g.edges.count({"x", 2}));
  EXPECT_FALSE(g.edges.count({"y", 2}));

  CachedSubgraph one;
  query_word_edges(tok("w"), fetch_synsets(tok("w"), graph), 1, graph, one);
  EXPECT_EQ(one.edges.size(), 1u);
  EXPECT_TRUE(one.edges.count({"s", 1}));
  EXPECT_THROW(query_word_edges(tok("w"), {}, 0, graph, one), Error);
}

TEST(QueryEdges, LitterReachesFauna) {
  auto graph = codenames::testing::load_graph("constraint_graph.jsonl");
  CachedSubgraph g;
  query_word_edges(tok("litter"), fetch_synsets(tok("litter"), *graph), 3, *graph, g);
  auto has = [&](const std::string& s, std::size_t level, const std::string& t, const std::string& rel) {
    auto it = g.edges.find({s, level});
    if (it == g.edges.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const Edge& e) { return e.target == t && e.relation_name == rel; });
  };
  EXPECT_TRUE(has("fx:litter", 1, "fx:animal_group", "is-a"));
  EXPECT_TRUE(has("fx:animal_group", 2, "fx:fauna", "subclass-of"));
}

TEST(FetchSynsets, FigureEightIds) {
  auto graph = codenames::testing::load_graph("musical_graph.jsonl");
  auto ids = [&](const char* w) {
    std::vector<std::string> out;
    for (const auto& s : fetch_synsets(tok(w), *graph)) out.push_back(s.id);
    return out;
  };
  EXPECT_EQ(ids("scale"), std::vector<std::string>{"bn:00056469n"});
  EXPECT_EQ(ids("opera"), std::vector<std::string>{"bn:00059107n"});
  EXPECT_TRUE(ids("unlisted").empty());
}

// Independent rule check used by the exhaustive path oracle.
bool oracle_valid(const std::vector<Edge>& edges, std::size_t max_len) {
  if (edges.size() > max_len) return false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].automatic) return false;
    if (i >= 1) {
      const auto& r = edges[i].relation_name;
      if (r != "is-a" && r != "subclass-of") return false;
      if (r != edges[1].relation_name) return false;
    }
  }
  return true;
}

TEST(GraphNeighbors, MatchesExhaustivePathEnumeration) {
  SeededRng rng(2024);
  const std::vector<std::string> relations{"is-a", "subclass-of", "has-part", "gloss-related"};
  for (int trial = 0; trial < 300; ++trial) {
    FixtureGraph graph;
    const std::size_t n = 4 + rng.below(10);
    auto id = [](std::size_t i) { return "n" + std::to_string(i); };
    for (std::size_t i = 0; i < n; ++i) {
      graph.add_synset(Synset{id(i), "label" + std::to_string(i) + (i % 3 ? "_x" : ""), {}, "NOUN", {}});
    }
    std::map<std::string, std::vector<Edge>> adj;
    const std::size_t m = rng.below(3 * n);
    for (std::size_t k = 0; k < m; ++k) {
      auto a = rng.below(n), b = rng.below(n);
      if (a == b) continue;
      auto e = edge(id(a), id(b), relations[rng.below(relations.size())], rng.below(5) == 0);
      graph.add_edge(e);
      adj[e.source].push_back(e);
    }
    graph.add_lemma(tok("w"), {id(0)});
    const std::size_t levels = 1 + rng.below(3);
    auto sub = codenames::testing::full_subgraph(graph, tok("w"), levels);

    std::map<std::string, std::size_t> expect;
    std::vector<Edge> stack;
    std::function<void(const std::string&)> dfs = [&](const std::string& at) {
      auto [it, fresh] = expect.emplace(at, stack.size());
      if (!fresh) it->second = std::min(it->second, stack.size());
      if (stack.size() == levels) return;
      for (const auto& e : adj[at]) {
        bool seen = e.target == id(0) ||
                    std::any_of(stack.begin(), stack.end(), [&](const Edge& x) { return x.target == e.target; });
        if (seen) continue;
        stack.push_back(e);
        if (oracle_valid(stack, levels)) dfs(e.target);
        stack.pop_back();
      }
    };
    dfs(id(0));

    auto got = shortest_valid_paths(sub);
    ASSERT_EQ(got.size(), expect.size()) << "trial " << trial;
    for (const auto& [target, p] : got) {
      EXPECT_EQ(p.length(), expect.at(target)) << "trial " << trial << " " << target;
      EXPECT_TRUE(validate_path(p, levels));
    }
    for (const auto& nb : graph_neighbors(sub)) EXPECT_TRUE(validate_path(nb.provenance, levels));
  }
}

}  // namespace
}  // namespace codenames::babelnet
