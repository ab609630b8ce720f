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
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "codenames/error.hpp"
#include "codenames/rng.hpp"

namespace codenames {

// A normalized game word: lowercase, no whitespace, multi-word lemmas joined
// with '_'. Only ASCII letters are case-folded; other UTF-8 bytes pass through.
class WordToken {
 public:
  WordToken() = default;

  static WordToken normalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_gap = false;
    for (char ch : raw) {
      const auto c = static_cast<unsigned char>(ch);
      if (std::isspace(c)) {
        pending_gap = !out.empty();
        continue;
      }
      if (pending_gap) {
        out.push_back('_');
        pending_gap = false;
      }
      out.push_back(static_cast<char>(std::tolower(c)));
    }
    if (out.empty()) {
      throw Error(ErrorCode::kEmptyToken, "token is empty after trimming");
    }
    return WordToken(std::move(out));
  }

  const std::string& str() const noexcept { return text_; }
  bool empty() const noexcept { return text_.empty(); }
  bool is_multiword() const noexcept { return text_.find('_') != std::string::npos; }

  friend auto operator<=>(const WordToken&, const WordToken&) = default;
  friend bool operator==(const WordToken&, const WordToken&) = default;
  friend std::ostream& operator<<(std::ostream& os, const WordToken& t) { return os << t.text_; }

 private:
  explicit WordToken(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

inline WordToken normalize_token(std::string_view raw) { return WordToken::normalize(raw); }

// A usable single-word clue: no '_', digits or ASCII punctuation. Non-ASCII
// bytes are allowed so accented words survive.
inline bool is_legal_clue_token(const WordToken& t) {
  if (t.empty()) return false;
  for (char ch : t.str()) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) continue;
    if (!std::isalpha(c)) return false;
  }
  return true;
}

}  // namespace codenames

template <>
struct std::hash<codenames::WordToken> {
  std::size_t operator()(const codenames::WordToken& t) const noexcept {
    return std::hash<std::string>{}(t.str());
  }
};

namespace codenames {

using TokenList = std::vector<WordToken>;

// Two equally sized, disjoint teams. Both teams are kept sorted so that every
// downstream iteration order is canonical.
class Board {
 public:
  Board() = default;

  Board(TokenList blue, TokenList red, std::optional<std::uint64_t> seed = std::nullopt)
      : blue_(std::move(blue)), red_(std::move(red)), seed_(seed) {
    std::sort(blue_.begin(), blue_.end());
    std::sort(red_.begin(), red_.end());
    if (std::adjacent_find(blue_.begin(), blue_.end()) != blue_.end() ||
        std::adjacent_find(red_.begin(), red_.end()) != red_.end()) {
      throw Error(ErrorCode::kMalformedBoard, "duplicate word within a team");
    }
    if (blue_.size() != red_.size()) {
      throw Error(ErrorCode::kWrongCount, "blue has " + std::to_string(blue_.size()) +
                                              " words, red has " + std::to_string(red_.size()));
    }
    if (blue_.empty()) throw Error(ErrorCode::kWrongCount, "board has no words");
    TokenList both;
    std::set_intersection(blue_.begin(), blue_.end(), red_.begin(), red_.end(),
                          std::back_inserter(both));
    if (!both.empty()) {
      throw Error(ErrorCode::kOverlappingTeams, "'" + both.front().str() + "' is on both teams");
    }
  }

  const TokenList& blue() const noexcept { return blue_; }
  const TokenList& red() const noexcept { return red_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  std::size_t per_team() const noexcept { return blue_.size(); }

  bool is_blue(const WordToken& w) const { return std::binary_search(blue_.begin(), blue_.end(), w); }
  bool is_red(const WordToken& w) const { return std::binary_search(red_.begin(), red_.end(), w); }
  bool contains(const WordToken& w) const { return is_blue(w) || is_red(w); }

  // blue followed by red, each sorted
  TokenList all_words() const {
    TokenList out(blue_);
    out.insert(out.end(), red_.begin(), red_.end());
    return out;
  }

  friend bool operator==(const Board& a, const Board& b) {
    return a.blue_ == b.blue_ && a.red_ == b.red_;
  }

 private:
  TokenList blue_;
  TokenList red_;
  std::optional<std::uint64_t> seed_;
};

// The m blue words a clue is meant to indicate, kept sorted.
class IntendedPair {
 public:
  IntendedPair() = default;

  explicit IntendedPair(TokenList words) : words_(std::move(words)) {
    std::sort(words_.begin(), words_.end());
    if (words_.empty() || std::adjacent_find(words_.begin(), words_.end()) != words_.end()) {
      throw Error(ErrorCode::kInvalidConfig, "intended words must be non-empty and distinct");
    }
  }

  IntendedPair(TokenList words, const Board& board) : IntendedPair(std::move(words)) {
    for (const auto& w : words_) {
      if (!board.is_blue(w)) {
        throw Error(ErrorCode::kInvalidConfig, "intended word '" + w.str() + "' is not blue");
      }
    }
  }

  const TokenList& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool contains(const WordToken& w) const {
    return std::binary_search(words_.begin(), words_.end(), w);
  }

  friend auto operator<=>(const IntendedPair&, const IntendedPair&) = default;
  friend bool operator==(const IntendedPair&, const IntendedPair&) = default;

 private:
  TokenList words_;
};

inline TokenList read_wordlist(std::istream& in) {
  TokenList words;
  std::unordered_set<WordToken> seen;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto token = WordToken::normalize(line);
    if (seen.insert(token).second) words.push_back(std::move(token));
  }
  return words;
}

// Samples 2*per_team distinct words without replacement (partial Fisher-Yates
// over SeededRng); the first per_team drawn form the blue team.
inline Board generate_board(const TokenList& wordlist, std::size_t per_team, std::uint64_t seed) {
  if (per_team == 0) throw Error(ErrorCode::kInsufficientWords, "per_team must be positive");
  if (wordlist.size() < 2 * per_team) {
    throw Error(ErrorCode::kInsufficientWords,
                "need " + std::to_string(2 * per_team) + " words, have " +
                    std::to_string(wordlist.size()));
  }
  TokenList pool(wordlist);
  SeededRng rng(seed);
  const std::size_t take = 2 * per_team;
  for (std::size_t i = 0; i < take; ++i) {
    auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  TokenList blue(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_team));
  TokenList red(pool.begin() + static_cast<std::ptrdiff_t>(per_team),
                pool.begin() + static_cast<std::ptrdiff_t>(take));
  return Board(std::move(blue), std::move(red), seed);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline TokenList parse_team_line(std::string_view body) {
  TokenList out;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto comma = body.find(',', start);
    auto piece = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start));
    if (piece.empty()) throw Error(ErrorCode::kMalformedBoard, "empty word in team list");
    out.push_back(WordToken::normalize(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// Board file: a `blue: w1, w2, ...` line and a `red: w1, w2, ...` line.
// Blank lines and lines starting with '#' are ignored.
inline Board parse_board(std::istream& in) {
  std::optional<TokenList> blue;
  std::optional<TokenList> red;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kMalformedBoard, "line " + std::to_string(lineno) + ": missing ':'");
    }
    std::string key(detail::trim(text.substr(0, colon)));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto body = text.substr(colon + 1);
    std::optional<TokenList>* slot = nullptr;
    if (key == "blue") slot = &blue;
    else if (key == "red") slot = &red;
    else throw Error(ErrorCode::kMalformedBoard, "line " + std::to_string(lineno) + ": unknown team '" + key + "'");
    if (slot->has_value()) {
      throw Error(ErrorCode::kMalformedBoard, "team '" + key + "' listed twice");
    }
    slot->emplace(detail::parse_team_line(body));
  }
  if (!blue || !red) throw Error(ErrorCode::kMalformedBoard, "board needs both a blue and a red line");
  return Board(std::move(*blue), std::move(*red));
}

inline Board parse_board(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_board(in);
}

inline std::string format_board(const Board& board) {
  std::string out = "blue: ";
  auto append = [&out](const TokenList& team) {
    for (std::size_t i = 0; i < team.size(); ++i) {
      if (i) out += ", ";
      out += team[i].str();
    }
    out += '\n';
  };
  append(board.blue());
  out += "red: ";
  append(board.red());
  return out;
}

}  // namespace codenames
