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
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "codenames/core.hpp"
#include "codenames/error.hpp"

namespace codenames {

// Document frequencies: for each token, the number of documents containing it
// at least once.
class DocFreqTable {
 public:
  DocFreqTable() = default;

  DocFreqTable(std::unordered_map<WordToken, std::uint64_t> counts, std::uint64_t total_docs)
      : counts_(std::move(counts)), total_docs_(total_docs) {
    if (total_docs_ == 0) throw Error(ErrorCode::kEmptyCorpus, "table has zero documents");
    for (const auto& [token, df] : counts_) {
      if (df == 0 || df > total_docs_) {
        throw Error(ErrorCode::kMalformedRecord,
                    "df for '" + token.str() + "' out of range: " + std::to_string(df));
      }
    }
  }

  std::optional<std::uint64_t> df(const WordToken& w) const {
    auto it = counts_.find(w);
    if (it == counts_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t total_docs() const noexcept { return total_docs_; }
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }
  const std::unordered_map<WordToken, std::uint64_t>& counts() const noexcept { return counts_; }

  // Tokens sorted by token text; the persisted order.
  std::vector<std::pair<WordToken, std::uint64_t>> sorted_entries() const {
    std::vector<std::pair<WordToken, std::uint64_t>> out(counts_.begin(), counts_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const DocFreqTable& a, const DocFreqTable& b) {
    return a.total_docs_ == b.total_docs_ && a.counts_ == b.counts_;
  }

 private:
  std::unordered_map<WordToken, std::uint64_t> counts_;
  std::uint64_t total_docs_ = 0;
};

// Lowercased runs of ASCII letters; everything else separates tokens.
inline std::vector<WordToken> tokenize_document(std::string_view text) {
  std::vector<WordToken> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(WordToken::normalize(current));
      current.clear();
    }
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalpha(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// Accumulates document frequencies. Builders over disjoint shards merge into
// exactly the table a single builder would produce.
class DocFreqBuilder {
 public:
  void add_document(const std::vector<WordToken>& tokens) {
    std::unordered_set<WordToken> seen(tokens.begin(), tokens.end());
    for (const auto& t : seen) ++counts_[t];
    ++docs_;
  }

  void add_text(std::string_view text) { add_document(tokenize_document(text)); }

  void merge(const DocFreqBuilder& other) {
    for (const auto& [t, n] : other.counts_) counts_[t] += n;
    docs_ += other.docs_;
  }

  std::uint64_t documents() const noexcept { return docs_; }

  DocFreqTable build() const {
    if (docs_ == 0) throw Error(ErrorCode::kEmptyCorpus, "no documents ingested");
    return DocFreqTable(counts_, docs_);
  }

 private:
  std::unordered_map<WordToken, std::uint64_t> counts_;
  std::uint64_t docs_ = 0;
};

inline DocFreqTable ingest_corpus(const std::vector<std::vector<WordToken>>& documents) {
  DocFreqBuilder builder;
  for (const auto& doc : documents) builder.add_document(doc);
  return builder.build();
}

// Tokenizes and counts raw document texts, sharding across `threads` workers.
inline DocFreqTable ingest_texts(const std::vector<std::string>& texts, unsigned threads = 1) {
  if (texts.empty()) throw Error(ErrorCode::kEmptyCorpus, "no documents ingested");
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(texts.size())));
  std::vector<DocFreqBuilder> shards(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned s = 0; s < threads; ++s) {
      workers.emplace_back([&, s] {
        for (std::size_t i = s; i < texts.size(); i += threads) shards[s].add_text(texts[i]);
      });
    }
  }
  for (unsigned s = 1; s < threads; ++s) shards[0].merge(shards[s]);
  return shards[0].build();
}

// One document per regular file, visited in path order.
inline std::vector<std::string> read_corpus_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> docs;
  docs.reserve(files.size());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    docs.push_back(ss.str());
  }
  return docs;
}

// Documents separated by lines exactly equal to `delimiter`.
inline std::vector<std::string> read_corpus_delimited(std::istream& in, std::string_view delimiter) {
  std::vector<std::string> docs;
  std::string current;
  std::string line;
  bool open = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == delimiter) {
      if (open) docs.push_back(std::move(current));
      current.clear();
      open = false;
      continue;
    }
    current += line;
    current += '\n';
    open = true;
  }
  if (open) docs.push_back(std::move(current));
  return docs;
}

inline void write_docfreq(const DocFreqTable& table, std::ostream& out) {
  out << "#totaldocs\t" << table.total_docs() << '\n';
  for (const auto& [token, df] : table.sorted_entries()) out << token.str() << '\t' << df << '\n';
}

inline DocFreqTable read_docfreq(std::istream& in) {
  std::string line;
  std::optional<std::uint64_t> total;
  std::unordered_map<WordToken, std::uint64_t> counts;
  int lineno = 0;
  auto parse_u64 = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": bad count");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(lineno) + ": missing tab");
    }
    std::string_view key(line.data(), tab);
    std::string_view value(line.data() + tab + 1, line.size() - tab - 1);
    if (key == "#totaldocs") {
      total = parse_u64(value);
      continue;
    }
    counts.emplace(WordToken::normalize(key), parse_u64(value));
  }
  if (!total) throw Error(ErrorCode::kMalformedRecord, "missing #totaldocs header");
  return DocFreqTable(std::move(counts), *total);
}

struct FreqParams {
  double alpha = 1.0 / 1667.0;
};

// FREQ(w): -(1/df) while 1/df >= alpha, -1 once the word is too common (1/df <
// alpha). Words missing from the table are treated as maximally rare.
inline double freq_score(const DocFreqTable& table, const WordToken& w, const FreqParams& params) {
  auto df = table.df(w);
  if (!df) return -1.0;
  const double inv = 1.0 / static_cast<double>(*df);
  if (inv >= params.alpha) return -inv;
  return -1.0;
}

}  // namespace codenames
