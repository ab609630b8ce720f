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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "codenames/babelnet/graph.hpp"
#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"
#include "codenames/scoring.hpp"

namespace codenames {

enum class SourceKind { kEmbedding, kGraph };

// Uniform view over a word representation: s(w1, w2) plus the neighbor sets
// candidate clues are drawn from.
class RelatednessSource {
 public:
  virtual ~RelatednessSource() = default;
  virtual SourceKind kind() const = 0;
  virtual const std::string& name() const = 0;
  virtual bool covers(const WordToken& board_word) const = 0;
  // s(clue, board_word)
  virtual double similarity(const WordToken& clue, const WordToken& board_word) const = 0;
  // Neighbor tokens of a board word that pass `filter`. T only bounds
  // embedding neighborhoods; graph neighborhoods are bounded by path length.
  virtual TokenList neighbors(const WordToken& board_word, std::size_t T,
                              const CandidateFilter& filter) const = 0;
  virtual std::optional<std::string> explain(const WordToken&, const WordToken&) const { return std::nullopt; }
};

class EmbeddingRelatedness : public RelatednessSource {
 public:
  EmbeddingRelatedness(std::string name, StorePtr store, IndexMode mode = IndexMode::kAuto,
                       AnnOptions options = {})
      : name_(std::move(name)), index_(std::move(store), mode, options) {}

  SourceKind kind() const override { return SourceKind::kEmbedding; }
  const std::string& name() const override { return name_; }
  bool covers(const WordToken& w) const override { return index_.store().contains(w); }

  double similarity(const WordToken& clue, const WordToken& board_word) const override {
    return codenames::similarity(index_.store(), clue, board_word);
  }

  TokenList neighbors(const WordToken& w, std::size_t T, const CandidateFilter& filter) const override {
    TokenList out;
    for (auto& n : index_.query(w, T, filter).neighbors) out.push_back(std::move(n.token));
    return out;
  }

  const NeighborIndex& index() const noexcept { return index_; }

 private:
  std::string name_;
  NeighborIndex index_;
};

// Path-based relatedness over cached subgraphs. s(c, w) uses the
// representative (shortest path, then lightest label weight) of c among w's
// graph neighbors; a clue outside w's neighborhood has similarity 0.
class GraphRelatedness : public RelatednessSource {
 public:
  GraphRelatedness(std::string name, const std::map<WordToken, babelnet::CachedSubgraph>& subgraphs,
                   const babelnet::LabelWeights& weights = {},
                   babelnet::LabelMode mode = babelnet::LabelMode::kOverwrite,
                   std::size_t levels = babelnet::kDefaultLevels)
      : name_(std::move(name)) {
    for (const auto& [word, g] : subgraphs) {
      if (!g.complete) continue;
      auto limited = g;
      limited.levels = std::min(levels, g.levels);
      neighbors_.emplace(word, babelnet::best_neighbors(babelnet::graph_neighbors(limited, weights, mode)));
    }
  }

  SourceKind kind() const override { return SourceKind::kGraph; }
  const std::string& name() const override { return name_; }
  bool covers(const WordToken& w) const override { return neighbors_.count(w) != 0; }

  double similarity(const WordToken& clue, const WordToken& board_word) const override {
    const auto* n = find(clue, board_word);
    return n ? n->similarity() : 0.0;
  }

  TokenList neighbors(const WordToken& w, std::size_t, const CandidateFilter& filter) const override {
    TokenList out;
    for (const auto& [token, _] : table(w)) {
      if (!filter || filter(token)) out.push_back(token);
    }
    return out;
  }

  std::optional<std::string> explain(const WordToken& clue, const WordToken& board_word) const override {
    const auto* n = find(clue, board_word);
    if (!n) return std::nullopt;
    std::string s = board_word.str() + " [" + n->provenance.origin_synset + "]";
    for (const auto& e : n->provenance.edges) s += " -" + e.relation_name + "-> " + e.target;
    s += " => " + clue.str() + " (h=" + std::to_string(n->path_length) +
         ", weight=" + std::to_string(n->label_weight) + ")";
    return s;
  }

 private:
  const std::map<WordToken, babelnet::GraphNeighbor>& table(const WordToken& w) const {
    auto it = neighbors_.find(w);
    if (it == neighbors_.end()) {
      throw Error(ErrorCode::kUnknownBoardWord, "'" + w.str() + "' has no cached subgraph");
    }
    return it->second;
  }

  const babelnet::GraphNeighbor* find(const WordToken& clue, const WordToken& board_word) const {
    const auto& t = table(board_word);
    auto it = t.find(clue);
    return it == t.end() ? nullptr : &it->second;
  }

  std::string name_;
  std::map<WordToken, std::map<WordToken, babelnet::GraphNeighbor>> neighbors_;
};

// Crude suffix stripping used by the optional strict legality mode.
inline std::string simple_stem(std::string_view word) {
  static constexpr std::string_view kSuffixes[] = {"ies", "ing", "es", "ed", "er", "ly", "s"};
  std::string w(word);
  for (auto suffix : kSuffixes) {
    if (w.size() >= suffix.size() + 3 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0) {
      w.resize(w.size() - suffix.size());
      if (suffix == "ies") w += 'y';
      break;
    }
  }
  return w;
}

struct ClueOptions {
  unsigned threads = 1;
  // Also reject candidates whose stem matches a board word's stem.
  bool strict_stems = false;
};

// Legal clue: single alphabetic word that is not on the board.
inline CandidateFilter make_legality_filter(const Board& board, bool strict_stems = false) {
  std::set<std::string> stems;
  if (strict_stems) {
    for (const auto& w : board.all_words()) stems.insert(simple_stem(w.str()));
  }
  return [&board, strict_stems, stems](const WordToken& t) {
    if (!is_legal_clue_token(t) || board.contains(t)) return false;
    return !strict_stems || !stems.count(simple_stem(t.str()));
  };
}

struct CandidateSet {
  TokenList tokens;  // sorted, unique
  // Graph neighborhoods of the intended words did not intersect; the set is
  // their union and the clue may only fit one of them.
  bool single_word_fallback = false;
};

inline CandidateSet candidate_clues(const Board& board, const IntendedPair& pair, const RelatednessSource& source,
                                    const ScoringParams& params, const ClueOptions& options = {}) {
  for (const auto& w : pair.words()) {
    if (!board.is_blue(w)) throw Error(ErrorCode::kInvalidConfig, "'" + w.str() + "' is not blue");
    if (!source.covers(w)) {
      throw Error(ErrorCode::kUnknownBoardWord, "'" + w.str() + "' unknown to " + source.name());
    }
  }
  auto filter = make_legality_filter(board, options.strict_stems);
  CandidateSet out;
  std::vector<TokenList> sets;
  for (const auto& w : pair.words()) {
    auto n = source.neighbors(w, params.top_t, filter);
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    sets.push_back(std::move(n));
  }
  auto unite = [&] {
    TokenList all;
    for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  };
  if (source.kind() == SourceKind::kEmbedding) {
    out.tokens = unite();
    return out;
  }
  TokenList common = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) {
    TokenList next;
    std::set_intersection(common.begin(), common.end(), sets[i].begin(), sets[i].end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (!common.empty()) {
    out.tokens = std::move(common);
  } else {
    out.tokens = unite();
    out.single_word_fallback = sets.size() > 1;
  }
  return out;
}

struct ClueResult {
  WordToken clue;
  IntendedPair intended;
  double score = 0.0;
  ScoreBreakdown breakdown;
  std::string representation;
  ScoringFn scoring_fn = ScoringFn::kOurs;
  bool detect = false;
  bool single_word_fallback = false;
  std::vector<std::string> provenance;

  friend bool operator==(const ClueResult&, const ClueResult&) = default;
};

// All size-m subsets of `words`, each sorted, in lexicographic order.
inline std::vector<TokenList> subsets_of_size(const TokenList& words, std::size_t m) {
  std::vector<TokenList> out;
  if (m == 0 || m > words.size()) return out;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    TokenList s;
    for (auto i : idx) s.push_back(words[i]);
    out.push_back(std::move(s));
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == words.size() - m + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

struct DetectResources {
  const DocFreqTable* df = nullptr;
  const EmbeddingStore* dict = nullptr;
};

namespace detail {

struct Scored {
  double total = kRejectedScore;
  std::size_t token = 0;  // index into the candidate universe
  std::size_t pair = 0;
  ScoreBreakdown breakdown;
  bool valid = false;
};

// Higher total, then smaller clue token, then smaller pair.
inline bool scored_before(const Scored& a, const Scored& b, const TokenList& universe) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.total != b.total) return a.total > b.total;
  if (universe[a.token] != universe[b.token]) return universe[a.token] < universe[b.token];
  return a.pair < b.pair;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0u);
    return;
  }
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i, t);
    });
  }
}

}  // namespace detail

// Scores every (intended subset, candidate) combination and returns the best.
// The reduction uses a strict total order, so the result does not depend on
// the thread count.
inline ClueResult choose_clue(const Board& board, const RelatednessSource& source, const ScoringParams& params,
                              ScoringFn scoring_fn, bool detect, const DetectResources& resources = {},
                              const ClueOptions& options = {}) {
  params.validate();
  if (detect && !resources.df) {
    throw Error(ErrorCode::kInvalidConfig, "DETECT needs a document-frequency table");
  }
  if (params.m > board.blue().size()) {
    throw Error(ErrorCode::kInvalidConfig, "m exceeds the number of blue words");
  }
  const auto all = board.all_words();
  for (const auto& w : all) {
    if (!source.covers(w)) {
      throw Error(ErrorCode::kUnknownBoardWord, "'" + w.str() + "' unknown to " + source.name());
    }
  }
  const auto& blue = board.blue();
  const auto& red = board.red();
  const auto pairs = subsets_of_size(blue, params.m);

  std::vector<CandidateSet> candidates(pairs.size());
  detail::parallel_for(pairs.size(), options.threads, [&](std::size_t p, unsigned) {
    candidates[p] = candidate_clues(board, IntendedPair(pairs[p]), source, params, options);
  });

  TokenList universe;
  for (const auto& c : candidates) universe.insert(universe.end(), c.tokens.begin(), c.tokens.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  if (universe.empty()) throw Error(ErrorCode::kNoCandidates, "no legal candidate clues for this board");

  // Similarities of every candidate to every board word, blue first then red.
  const std::size_t width = all.size();
  std::vector<double> sims(universe.size() * width);
  std::vector<double> freq(universe.size(), 0.0);
  std::vector<double> dict_rel(detect ? universe.size() * width : 0);
  detail::parallel_for(universe.size(), options.threads, [&](std::size_t u, unsigned) {
    for (std::size_t w = 0; w < width; ++w) {
      sims[u * width + w] = source.similarity(universe[u], all[w]);
      if (detect) dict_rel[u * width + w] = 1.0 - dict_relatedness(resources.dict, universe[u], all[w]);
    }
    if (detect) freq[u] = freq_score(*resources.df, universe[u], params.freq());
  });

  std::vector<std::vector<std::size_t>> pair_index(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto& w : pairs[p]) {
      pair_index[p].push_back(static_cast<std::size_t>(std::lower_bound(blue.begin(), blue.end(), w) - blue.begin()));
    }
  }

  auto evaluate = [&](std::size_t p, std::size_t u, bool relaxed) {
    detail::Scored s;
    s.token = u;
    s.pair = p;
    s.valid = true;
    const double* row = &sims[u * width];
    SimilarityProfile profile;
    profile.clue = universe[u];
    for (auto b : pair_index[p]) profile.blue_sims.emplace(blue[b], row[b]);
    for (std::size_t r = 0; r < red.size(); ++r) profile.red_sims.emplace(red[r], row[blue.size() + r]);
    ScoreBreakdown& bd = s.breakdown;
    if (scoring_fn == ScoringFn::kOurs) {
      bd.base = score_g(profile, params);
    } else {
      auto k = score_gkim(profile, params);
      bd.kim_constraint_passed = k.passed;
      bd.base = k.score;
      if (relaxed) {
        bd.relaxed = true;
        bd.base = detail::min_blue(profile.blue_sims);
      }
    }
    if (detect) {
      const double* drow = &dict_rel[u * width];
      bd.freq_term = freq[u];
      for (auto b : pair_index[p]) bd.dict_blue_sum += drow[b];
      for (std::size_t r = 0; r < red.size(); ++r) {
        double v = drow[blue.size() + r];
        bd.dict_red_max = r == 0 ? v : std::max(bd.dict_red_max, v);
      }
      bd.detect = combine_detect(bd.freq_term, bd.dict_blue_sum, bd.dict_red_max, params);
    }
    bd.total = recompute_total(bd, scoring_fn, detect);
    s.total = bd.total;
    return s;
  };

  auto search = [&](bool relaxed) {
    std::vector<detail::Scored> best(pairs.size());
    detail::parallel_for(pairs.size(), options.threads, [&](std::size_t p, unsigned) {
      for (const auto& token : candidates[p].tokens) {
        auto u = static_cast<std::size_t>(std::lower_bound(universe.begin(), universe.end(), token) - universe.begin());
        auto s = evaluate(p, u, relaxed);
        if (detail::scored_before(s, best[p], universe)) best[p] = std::move(s);
      }
    });
    detail::Scored winner;
    for (auto& b : best) {
      if (detail::scored_before(b, winner, universe)) winner = std::move(b);
    }
    return winner;
  };

  auto winner = search(false);
  if (scoring_fn == ScoringFn::kKim && (!winner.valid || !winner.breakdown.kim_constraint_passed)) {
    winner = search(true);
  }
  if (!winner.valid) throw Error(ErrorCode::kNoCandidates, "no candidate could be scored");

  ClueResult result;
  result.clue = universe[winner.token];
  result.intended = IntendedPair(pairs[winner.pair]);
  result.breakdown = winner.breakdown;
  result.score = winner.breakdown.total;
  result.representation = source.name();
  result.scoring_fn = scoring_fn;
  result.detect = detect;
  result.single_word_fallback = candidates[winner.pair].single_word_fallback;
  for (const auto& w : result.intended.words()) {
    if (auto e = source.explain(result.clue, w)) result.provenance.push_back(*e);
  }
  return result;
}

}  // namespace codenames
