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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codenames/core.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/rng.hpp"

#ifndef CODENAMES_TEST_DATA
#define CODENAMES_TEST_DATA "tests/data"
#endif

namespace codenames::testing {

inline std::filesystem::path data_path(std::string_view name) {
  return std::filesystem::path(CODENAMES_TEST_DATA) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    SeededRng rng(reinterpret_cast<std::uintptr_t>(this) ^ static_cast<std::uint64_t>(::getpid()) ^ ++counter);
    path_ = std::filesystem::temp_directory_path() / ("codenames-test-" + std::to_string(rng.next()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline WordToken tok(std::string_view s) { return WordToken::normalize(s); }

inline TokenList toks(std::initializer_list<std::string_view> words) {
  TokenList out;
  for (auto w : words) out.push_back(tok(w));
  return out;
}

inline double gaussian(SeededRng& rng) {
  double u1 = rng.unit();
  while (u1 <= 0.0) u1 = rng.unit();
  const double u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::vector<float> random_vector(SeededRng& rng, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(gaussian(rng));
  return v;
}

inline std::string random_word(SeededRng& rng, std::size_t min_len, std::size_t max_len) {
  const auto len = min_len + static_cast<std::size_t>(rng.below(max_len - min_len + 1));
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<char>('a' + rng.below(26)));
  return s;
}

using VectorTable = std::vector<std::pair<std::string, std::vector<float>>>;

inline EmbeddingStore make_store(std::string name, const VectorTable& rows) {
  TokenList tokens;
  std::vector<float> data;
  const std::size_t dim = rows.empty() ? 0 : rows.front().second.size();
  for (const auto& [t, v] : rows) {
    tokens.push_back(tok(t));
    data.insert(data.end(), v.begin(), v.end());
  }
  return EmbeddingStore(std::move(name), dim, std::move(tokens), std::move(data));
}

inline StorePtr make_store_ptr(std::string name, const VectorTable& rows) {
  return std::make_shared<const EmbeddingStore>(make_store(std::move(name), rows));
}

inline StorePtr load_store_path(const std::filesystem::path& p, std::string name) {
  std::ifstream in(p);
  return std::make_shared<const EmbeddingStore>(load_embeddings(in, std::move(name)));
}

}  // namespace codenames::testing
