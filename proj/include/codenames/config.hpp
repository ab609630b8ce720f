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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "codenames/babelnet/cache.hpp"
#include "codenames/cluegiver.hpp"
#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"
#include "codenames/scoring.hpp"
#include "codenames/service.hpp"

namespace codenames {

// Engine configuration. INI layout:
//
//   [paths]       wordlist, docfreq, dict, babelnet_cache, sessions, static
//   [embeddings]  <representation name> = <vector file>
//   [lambda_d]    <representation name> = <per-representation lambda_d>
//   [babelnet]    name, key
//   [scoring]     lambda_b lambda_r lambda_t lambda_f lambda_d alpha
//                 w1 w2 w3 w4 label_mode T m L
//   [engine]      per_team threads strict_stems index
//   [service]     host port
//
// Relative paths resolve against the directory holding the file.
struct EngineConfig {
  std::filesystem::path wordlist;
  std::filesystem::path docfreq;
  std::filesystem::path dict;
  std::filesystem::path babelnet_cache;
  std::filesystem::path sessions_dir = "sessions";
  std::filesystem::path static_dir;
  std::map<std::string, std::filesystem::path> embeddings;
  std::map<std::string, double> lambda_d_overrides;
  std::string babelnet_name = "babelnet";
  std::string babelnet_key;
  ScoringParams scoring;
  std::size_t per_team = 10;
  std::size_t threads = 1;
  bool strict_stems = false;
  IndexMode index = IndexMode::kAuto;
  std::string host = "127.0.0.1";
  int port = 8080;

  // Every configured path must exist and the scoring block must be valid.
  void validate() const {
    scoring.validate();
    auto need = [](const std::filesystem::path& p, const char* what) {
      if (!p.empty() && !std::filesystem::exists(p)) {
        throw Error(ErrorCode::kMissingResource, std::string(what) + " not found: " + p.string());
      }
    };
    need(wordlist, "wordlist");
    need(docfreq, "docfreq table");
    need(dict, "dict embeddings");
    need(babelnet_cache, "babelnet cache");
    for (const auto& [name, p] : embeddings) need(p, ("embeddings '" + name + "'").c_str());
    if (per_team == 0) throw Error(ErrorCode::kInvalidConfig, "per_team must be positive");
    if (threads == 0) throw Error(ErrorCode::kInvalidConfig, "threads must be positive");
    if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidConfig, "port out of range");
  }
};

inline IndexMode parse_index_mode(std::string_view s) {
  if (s == "exact") return IndexMode::kExact;
  if (s == "approx" || s == "approximate") return IndexMode::kApproximate;
  if (s == "auto") return IndexMode::kAuto;
  throw Error(ErrorCode::kInvalidConfig, "unknown index mode '" + std::string(s) + "'");
}

inline babelnet::LabelMode parse_label_mode(std::string_view s) {
  if (s == "overwrite") return babelnet::LabelMode::kOverwrite;
  if (s == "min-weight" || s == "min_weight") return babelnet::LabelMode::kMinWeight;
  throw Error(ErrorCode::kInvalidConfig, "unknown label mode '" + std::string(s) + "'");
}

inline EngineConfig parse_engine_config(std::istream& in, const std::filesystem::path& base = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
  };
  // Present keys must convert; absent keys keep the default.
  auto get = [&]<class T>(const char* key, T fallback) -> T {
    auto node = tree.get_child_optional(key);
    return node ? node->get_value<T>() : fallback;
  };
  EngineConfig c;
  try {
    c.wordlist = resolve(get("paths.wordlist", std::string()));
    c.docfreq = resolve(get("paths.docfreq", std::string()));
    c.dict = resolve(get("paths.dict", std::string()));
    c.babelnet_cache = resolve(get("paths.babelnet_cache", std::string()));
    c.sessions_dir = resolve(get("paths.sessions", std::string("sessions")));
    c.static_dir = resolve(get("paths.static", std::string()));
    if (auto e = tree.get_child_optional("embeddings")) {
      for (const auto& [name, v] : *e) c.embeddings[name] = resolve(v.data());
    }
    if (auto e = tree.get_child_optional("lambda_d")) {
      for (const auto& [name, v] : *e) c.lambda_d_overrides[name] = v.get_value<double>();
    }
    c.babelnet_name = get("babelnet.name", c.babelnet_name);
    c.babelnet_key = get("babelnet.key", std::string());
    auto& s = c.scoring;
    s.lambda_b = get("scoring.lambda_b", s.lambda_b);
    s.lambda_r = get("scoring.lambda_r", s.lambda_r);
    s.lambda_t = get("scoring.lambda_t", s.lambda_t);
    s.lambda_f = get("scoring.lambda_f", s.lambda_f);
    s.lambda_d = get("scoring.lambda_d", s.lambda_d);
    s.alpha = get("scoring.alpha", s.alpha);
    s.weights.w1 = get("scoring.w1", s.weights.w1);
    s.weights.w2 = get("scoring.w2", s.weights.w2);
    s.weights.w3 = get("scoring.w3", s.weights.w3);
    s.weights.w4 = get("scoring.w4", s.weights.w4);
    s.label_mode = parse_label_mode(get("scoring.label_mode", std::string("overwrite")));
    s.top_t = get("scoring.T", s.top_t);
    s.m = get("scoring.m", s.m);
    s.levels = get("scoring.L", s.levels);
    c.per_team = get("engine.per_team", c.per_team);
    c.threads = get("engine.threads", c.threads);
    c.strict_stems = get("engine.strict_stems", c.strict_stems);
    c.index = parse_index_mode(get("engine.index", std::string("auto")));
    c.host = get("service.host", c.host);
    c.port = get("service.port", c.port);
  } catch (const pt::ptree_bad_data& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  return c;
}

inline EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingResource, "config not found: " + path.string());
  return parse_engine_config(in, path.parent_path());
}

inline StorePtr load_store_file(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingResource, "cannot open " + path.string());
  return std::make_shared<const EmbeddingStore>(load_embeddings(in, name));
}

inline std::shared_ptr<const DocFreqTable> load_docfreq_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingResource, "cannot open " + path.string());
  return std::make_shared<const DocFreqTable>(read_docfreq(in));
}

inline TokenList load_wordlist_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingResource, "cannot open " + path.string());
  return read_wordlist(in);
}

// Complete cached subgraphs for `words`; words without one are skipped.
inline std::map<WordToken, babelnet::CachedSubgraph> load_subgraphs(const std::filesystem::path& dir,
                                                                    const TokenList& words) {
  babelnet::SubgraphCache cache(dir);
  std::map<WordToken, babelnet::CachedSubgraph> out;
  for (const auto& w : words) {
    if (auto g = cache.load(w); g && g->complete) out.emplace(w, std::move(*g));
  }
  return out;
}

// Loads every configured resource into a ClueEngine.
inline std::shared_ptr<ClueEngine> build_engine(const EngineConfig& config) {
  config.validate();
  if (config.wordlist.empty()) throw Error(ErrorCode::kInvalidConfig, "paths.wordlist is required");
  auto engine = std::make_shared<ClueEngine>(load_wordlist_file(config.wordlist), config.scoring, config.per_team,
                                             ClueOptions{static_cast<unsigned>(config.threads), config.strict_stems});
  std::shared_ptr<const DocFreqTable> df = config.docfreq.empty() ? nullptr : load_docfreq_file(config.docfreq);
  StorePtr dict = config.dict.empty() ? nullptr : load_store_file(config.dict, "dict");
  auto override_for = [&](const std::string& name) -> std::optional<double> {
    auto it = config.lambda_d_overrides.find(name);
    return it == config.lambda_d_overrides.end() ? std::nullopt : std::optional<double>(it->second);
  };
  for (const auto& [name, path] : config.embeddings) {
    auto source = std::make_shared<EmbeddingRelatedness>(name, load_store_file(path, name), config.index);
    engine->add_representation(name, Representation{source, df, dict, override_for(name)});
  }
  if (!config.babelnet_cache.empty()) {
    auto source = std::make_shared<GraphRelatedness>(
        config.babelnet_name, load_subgraphs(config.babelnet_cache, engine->wordlist()), config.scoring.weights,
        config.scoring.label_mode, config.scoring.levels);
    engine->add_representation(config.babelnet_name,
                               Representation{source, df, dict, override_for(config.babelnet_name)});
  }
  return engine;
}

}  // namespace codenames
