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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/error.hpp"
#include "codenames/numeric.hpp"
#include "codenames/rng.hpp"

namespace codenames {

// Immutable token -> dense vector table. Vectors are stored row-major as
// float; norms are precomputed in double.
class EmbeddingStore {
 public:
  EmbeddingStore(std::string name, std::size_t dim, TokenList tokens, std::vector<float> data)
      : name_(std::move(name)), dim_(dim), tokens_(std::move(tokens)), data_(std::move(data)) {
    if (tokens_.empty()) throw Error(ErrorCode::kEmptyStore, "store '" + name_ + "' has no vectors");
    if (dim_ == 0 || data_.size() != tokens_.size() * dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "data size does not match tokens x dim");
    }
    index_.reserve(tokens_.size());
    norms_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], i).second) {
        throw Error(ErrorCode::kMalformedRecord, "duplicate token '" + tokens_[i].str() + "'");
      }
      auto v = vector(i);
      norms_.push_back(std::sqrt(compensated_dot(v, v)));
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const TokenList& tokens() const noexcept { return tokens_; }
  const WordToken& token(std::size_t i) const { return tokens_[i]; }

  bool contains(const WordToken& w) const { return index_.count(w) != 0; }

  std::optional<std::size_t> index_of(const WordToken& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const WordToken& w) const {
    auto i = index_of(w);
    if (!i) throw Error(ErrorCode::kUnknownToken, "'" + w.str() + "' not in store '" + name_ + "'");
    return *i;
  }

  std::span<const float> vector(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  double norm(std::size_t i) const { return norms_[i]; }

  // Cosine similarity between two rows, clamped to [-1, 1].
  double cosine(std::size_t a, std::size_t b) const {
    if (norms_[a] == 0.0 || norms_[b] == 0.0) {
      throw Error(ErrorCode::kZeroVector, "zero-norm vector in store '" + name_ + "'");
    }
    if (a == b) return 1.0;
    const double c = compensated_dot(vector(a), vector(b)) / (norms_[a] * norms_[b]);
    return std::clamp(c, -1.0, 1.0);
  }

 private:
  std::string name_;
  std::size_t dim_;
  TokenList tokens_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<WordToken, std::size_t> index_;
};

using StorePtr = std::shared_ptr<const EmbeddingStore>;

struct LoadStats {
  std::size_t loaded = 0;
  std::size_t duplicates = 0;
  std::size_t unparseable = 0;
  std::size_t zero_vectors = 0;
  bool had_header = false;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Parses "<token> v1 ... vd"; returns false when a value is not numeric or the
// token cannot be normalized.
inline bool parse_vector_line(std::string_view line, std::size_t expected_dim, WordToken& token,
                              std::vector<float>& values, std::size_t lineno) {
  auto fields = split_fields(line);
  if (fields.empty()) return false;
  if (expected_dim != 0 && fields.size() - 1 != expected_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "line " + std::to_string(lineno) + " has " + std::to_string(fields.size() - 1) +
                    " values, expected " + std::to_string(expected_dim));
  }
  values.clear();
  for (std::size_t i = 1; i < fields.size(); ++i) {
    float v = 0;
    if (!parse_number(fields[i], v) || !std::isfinite(v)) return false;
    values.push_back(v);
  }
  try {
    token = WordToken::normalize(fields[0]);
  } catch (const Error&) {
    return false;
  }
  return !values.empty();
}

inline bool is_header(std::string_view line) {
  auto fields = split_fields(line);
  std::uint64_t a = 0, b = 0;
  return fields.size() == 2 && parse_number(fields[0], a) && parse_number(fields[1], b);
}

}  // namespace detail

// Reads the whitespace-separated vector text format. An optional first line
// "<count> <dim>" is consumed as a header. Duplicate tokens keep their first
// occurrence; zero vectors and unparseable lines are dropped and counted.
inline EmbeddingStore load_embeddings(std::istream& in, std::string name, LoadStats* stats = nullptr) {
  LoadStats local;
  std::size_t dim = 0;
  TokenList tokens;
  std::vector<float> data;
  std::unordered_set<WordToken> seen;
  std::string line;
  std::vector<float> values;
  WordToken token;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && detail::is_header(line)) {
      auto fields = detail::split_fields(line);
      detail::parse_number(fields[1], dim);
      local.had_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    if (!detail::parse_vector_line(line, dim, token, values, lineno)) {
      ++local.unparseable;
      continue;
    }
    if (dim == 0) dim = values.size();
    if (!seen.insert(token).second) {
      ++local.duplicates;
      continue;
    }
    double sq = compensated_dot(std::span<const float>(values), std::span<const float>(values));
    if (sq == 0.0) {
      ++local.zero_vectors;
      continue;
    }
    tokens.push_back(token);
    data.insert(data.end(), values.begin(), values.end());
  }
  local.loaded = tokens.size();
  if (stats) *stats = local;
  if (tokens.empty()) throw Error(ErrorCode::kEmptyStore, "no vectors read for '" + name + "'");
  return EmbeddingStore(std::move(name), dim, std::move(tokens), std::move(data));
}

inline void write_embeddings(const EmbeddingStore& store, std::ostream& out) {
  out << store.size() << ' ' << store.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.token(i).str();
    for (float v : store.vector(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

// Cosine similarity (1 minus cosine distance) between two in-vocabulary words.
inline double similarity(const EmbeddingStore& store, const WordToken& w1, const WordToken& w2) {
  return store.cosine(store.require(w1), store.require(w2));
}

struct Neighbor {
  WordToken token;
  double similarity = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Total order for neighbor lists: similarity descending, then token ascending.
inline bool neighbor_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.token < b.token;
}

struct NeighborList {
  WordToken origin;
  std::vector<Neighbor> neighbors;
  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

using CandidateFilter = std::function<bool(const WordToken&)>;

namespace detail {

// Keeps the best `limit` neighbors under neighbor_before.
class TopK {
 public:
  explicit TopK(std::size_t limit) : limit_(limit) {}

  void offer(const WordToken& token, double sim) {
    Neighbor n{token, sim};
    if (heap_.size() < limit_) {
      heap_.push_back(std::move(n));
      std::push_heap(heap_.begin(), heap_.end(), neighbor_before);
    } else if (limit_ > 0 && neighbor_before(n, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), neighbor_before);
      heap_.back() = std::move(n);
      std::push_heap(heap_.begin(), heap_.end(), neighbor_before);
    }
  }

  std::vector<Neighbor> take() {
    std::sort(heap_.begin(), heap_.end(), neighbor_before);
    return std::move(heap_);
  }

 private:
  std::size_t limit_;
  // max-heap on "worst first": front() is the entry every newcomer must beat
  std::vector<Neighbor> heap_;
};

}  // namespace detail

// Exact T nearest neighbors of `w` among tokens passing `filter`, excluding w.
inline NeighborList top_neighbors(const EmbeddingStore& store, const WordToken& w, std::size_t T,
                                  const CandidateFilter& filter = {}) {
  const std::size_t origin = store.require(w);
  detail::TopK top(T);
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (i == origin) continue;
    const auto& t = store.token(i);
    if (filter && !filter(t)) continue;
    top.offer(t, store.cosine(origin, i));
  }
  return NeighborList{w, top.take()};
}

enum class IndexMode { kExact, kApproximate, kAuto };

struct AnnOptions {
  std::size_t trees = 16;
  std::size_t leaf_size = 16;
  // Candidates gathered per query before exact re-ranking; 0 means
  // trees * T * 4.
  std::size_t search_k = 0;
  std::uint64_t seed = 0x5eed;
};

// Answers top-neighbor queries either by brute force or with a forest of
// random-hyperplane trees over angular distance. Approximate answers are
// re-ranked with exact cosine, so returned similarities are always exact.
class NeighborIndex {
 public:
  static constexpr std::size_t kExactLimit = 50000;

  explicit NeighborIndex(StorePtr store, IndexMode mode = IndexMode::kAuto, AnnOptions options = {})
      : store_(std::move(store)), options_(options) {
    if (!store_ || store_->size() == 0) throw Error(ErrorCode::kEmptyStore, "index over empty store");
    exact_ = mode == IndexMode::kExact ||
             (mode == IndexMode::kAuto && store_->size() <= kExactLimit);
    if (!exact_) build_forest();
  }

  bool exact() const noexcept { return exact_; }
  const EmbeddingStore& store() const noexcept { return *store_; }
  const StorePtr& store_ptr() const noexcept { return store_; }

  NeighborList query(const WordToken& w, std::size_t T, const CandidateFilter& filter = {}) const {
    if (exact_ || store_->size() <= options_.leaf_size) return top_neighbors(*store_, w, T, filter);
    const std::size_t origin = store_->require(w);
    auto candidates = gather(origin, effective_search_k(T));
    detail::TopK top(T);
    for (auto i : candidates) {
      if (i == origin) continue;
      const auto& t = store_->token(i);
      if (filter && !filter(t)) continue;
      top.offer(t, store_->cosine(origin, i));
    }
    return NeighborList{w, top.take()};
  }

  // Distinct vectors scored by an approximate query for w; the whole store in
  // exact mode.
  std::size_t examined(const WordToken& w, std::size_t T) const {
    if (exact_ || store_->size() <= options_.leaf_size) return store_->size();
    return gather(store_->require(w), effective_search_k(T)).size();
  }

 private:
  std::size_t effective_search_k(std::size_t T) const {
    return options_.search_k ? options_.search_k : options_.trees * std::max<std::size_t>(T, 1) * 4;
  }

  struct Node {
    std::vector<float> normal;  // empty for leaves
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::uint32_t> items;
  };

  double margin(const Node& node, std::size_t item) const {
    return compensated_dot(std::span<const float>(node.normal), store_->vector(item)) /
           store_->norm(item);
  }

  std::int32_t build_node(std::vector<std::uint32_t> items, SeededRng& rng) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    if (items.size() <= options_.leaf_size) {
      nodes_[id].items = std::move(items);
      return id;
    }
    const std::size_t dim = store_->dim();
    std::vector<float> normal(dim, 0.0f);
    for (int attempt = 0; attempt < 3; ++attempt) {
      auto a = items[rng.below(items.size())];
      auto b = items[rng.below(items.size())];
      if (a == b) continue;
      auto va = store_->vector(a);
      auto vb = store_->vector(b);
      for (std::size_t d = 0; d < dim; ++d) {
        normal[d] = static_cast<float>(va[d] / store_->norm(a) - vb[d] / store_->norm(b));
      }
      break;
    }
    nodes_[id].normal = normal;
    std::vector<std::uint32_t> left, right;
    for (auto i : items) {
      double m = margin(nodes_[id], i);
      if (m > 0 || (m == 0 && rng.below(2))) right.push_back(i);
      else left.push_back(i);
    }
    if (left.empty() || right.empty()) {
      // Degenerate hyperplane: fall back to a random balanced split.
      rng.shuffle(items);
      left.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(items.size() / 2));
      right.assign(items.begin() + static_cast<std::ptrdiff_t>(items.size() / 2), items.end());
      nodes_[id].normal.clear();
      nodes_[id].items.clear();
      // A node without a normal but with children: both sides are always searched.
    }
    auto l = build_node(std::move(left), rng);
    auto r = build_node(std::move(right), rng);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void build_forest() {
    SeededRng rng(options_.seed);
    std::vector<std::uint32_t> all(store_->size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    for (std::size_t t = 0; t < options_.trees; ++t) roots_.push_back(build_node(all, rng));
  }

  std::vector<std::uint32_t> gather(std::size_t origin, std::size_t search_k) const {
    using Entry = std::pair<double, std::int32_t>;
    std::priority_queue<Entry> queue;
    for (auto r : roots_) queue.emplace(std::numeric_limits<double>::infinity(), r);
    std::vector<std::uint32_t> found;
    while (!queue.empty() && found.size() < search_k) {
      auto [priority, id] = queue.top();
      queue.pop();
      const Node& node = nodes_[static_cast<std::size_t>(id)];
      if (node.left < 0) {
        found.insert(found.end(), node.items.begin(), node.items.end());
        continue;
      }
      if (node.normal.empty()) {
        queue.emplace(priority, node.left);
        queue.emplace(priority, node.right);
        continue;
      }
      double m = margin(node, origin);
      queue.emplace(std::min(priority, m), node.right);
      queue.emplace(std::min(priority, -m), node.left);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
  }

  StorePtr store_;
  AnnOptions options_;
  bool exact_ = true;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> roots_;
};

// One occurrence's contextual vector for a token.
struct ContextOccurrence {
  WordToken token;
  std::vector<float> vector;
};

// Streams occurrences and keeps a compensated running sum per token.
class ContextAverager {
 public:
  void add(const WordToken& token, std::span<const float> v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_ || dim_ == 0) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "occurrence of '" + token.str() + "' has dim " + std::to_string(v.size()) +
                      ", expected " + std::to_string(dim_));
    }
    auto& acc = sums_[token];
    if (acc.sums.empty()) acc.sums.resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) acc.sums[d].add(v[d]);
    ++acc.count;
  }

  void add(const ContextOccurrence& occ) { add(occ.token, occ.vector); }

  // Tokens are emitted in ascending order so the result is independent of the
  // occurrence order.
  EmbeddingStore build(std::string name) const {
    if (sums_.empty()) throw Error(ErrorCode::kEmptyStore, "no context occurrences");
    TokenList tokens;
    for (const auto& [t, _] : sums_) tokens.push_back(t);
    std::sort(tokens.begin(), tokens.end());
    TokenList kept;
    std::vector<float> data;
    for (const auto& t : tokens) {
      const auto& acc = sums_.at(t);
      std::vector<float> mean(dim_);
      bool nonzero = false;
      for (std::size_t d = 0; d < dim_; ++d) {
        mean[d] = static_cast<float>(acc.sums[d].value() / static_cast<double>(acc.count));
        nonzero = nonzero || mean[d] != 0.0f;
      }
      if (!nonzero) continue;
      kept.push_back(t);
      data.insert(data.end(), mean.begin(), mean.end());
    }
    return EmbeddingStore(std::move(name), dim_, std::move(kept), std::move(data));
  }

 private:
  struct Accumulator {
    std::vector<CompensatedSum> sums;
    std::uint64_t count = 0;
  };
  std::size_t dim_ = 0;
  std::unordered_map<WordToken, Accumulator> sums_;
};

inline EmbeddingStore average_contexts(std::span<const ContextOccurrence> occurrences, std::string name) {
  ContextAverager averager;
  for (const auto& occ : occurrences) averager.add(occ);
  return averager.build(std::move(name));
}

// Same line format as vector files; one line per occurrence.
inline EmbeddingStore average_contexts(std::istream& in, std::string name) {
  ContextAverager averager;
  std::string line;
  std::vector<float> values;
  WordToken token;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    if (!detail::parse_vector_line(line, dim, token, values, lineno)) continue;
    dim = values.size();
    averager.add(token, values);
  }
  return averager.build(std::move(name));
}

// Restricts a store to the k tokens with the highest document frequency among
// those present in both the store and the table (ties: token ascending).
inline EmbeddingStore filter_top_common(const EmbeddingStore& store, const DocFreqTable& table,
                                        std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "k must be at least 1");
  if (table.empty()) throw Error(ErrorCode::kEmptyCorpus, "document-frequency table is empty");
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (auto df = table.df(store.token(i))) ranked.emplace_back(*df, i);
  }
  if (ranked.empty()) throw Error(ErrorCode::kEmptyStore, "store and table share no tokens");
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return store.token(a.second) < store.token(b.second);
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::size_t> keep;
  for (const auto& r : ranked) keep.push_back(r.second);
  std::sort(keep.begin(), keep.end());
  TokenList tokens;
  std::vector<float> data;
  for (auto i : keep) {
    tokens.push_back(store.token(i));
    auto v = store.vector(i);
    data.insert(data.end(), v.begin(), v.end());
  }
  return EmbeddingStore(store.name() + "-top" + std::to_string(k), store.dim(), std::move(tokens),
                        std::move(data));
}

}  // namespace codenames
