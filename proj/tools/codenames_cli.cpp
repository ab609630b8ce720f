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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "codenames/babelnet/cache.hpp"
#include "codenames/babelnet/client.hpp"
#include "codenames/babelnet/source.hpp"
#include "codenames/cluegiver.hpp"
#include "codenames/config.hpp"
#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"
#include "codenames/eval.hpp"
#include "codenames/http.hpp"
#include "codenames/rng.hpp"
#include "codenames/service.hpp"

namespace fs = std::filesystem;
using namespace codenames;

namespace {

constexpr int kExitResource = 1;
constexpr int kExitUsage = 2;

// Writes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  out << text;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingResource, "cannot open " + path);
  return in;
}

Board read_board_file(const std::string& path) {
  auto in = open_input(path);
  return parse_board(in);
}

// A word file is either a board file or a plain word list.
TokenList read_words_file(const std::string& path) {
  std::stringstream buffer;
  buffer << open_input(path).rdbuf();
  const auto text = buffer.str();
  if (text.find("blue:") != std::string::npos) return parse_board(std::string_view(text)).all_words();
  std::istringstream in(text);
  return read_wordlist(in);
}

// Options shared by commands that load an engine.
struct EngineFlags {
  std::string config;
  std::string wordlist;
  std::vector<std::string> embeddings;  // name=path
  std::string docfreq;
  std::string dict;
  std::string babelnet_cache;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> top_t;
  std::optional<std::size_t> m;
  std::optional<double> lambda_t;
  std::optional<double> alpha;
  std::optional<std::size_t> per_team;
  std::string index;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "engine configuration file (INI)");
    app->add_option("--wordlist", wordlist, "board word list");
    app->add_option("--embeddings", embeddings, "representation as name=path (repeatable)");
    app->add_option("--docfreq", docfreq, "document-frequency table");
    app->add_option("--dict", dict, "dictionary embeddings used by DETECT");
    app->add_option("--babelnet-cache", babelnet_cache, "BabelNet subgraph cache directory");
    app->add_option("--threads", threads, "worker threads");
    app->add_option("--T", top_t, "nearest neighbors per board word");
    app->add_option("--m", m, "intended words per clue");
    app->add_option("--lambda-t", lambda_t, "threshold of the kim scorer");
    app->add_option("--alpha", alpha, "FREQ cutoff");
    app->add_option("--per-team", per_team, "words per team");
    app->add_option("--index", index, "neighbor index: exact, approx or auto");
  }

  EngineConfig resolve() const {
    EngineConfig c = config.empty() ? EngineConfig{} : load_engine_config(config);
    if (!wordlist.empty()) c.wordlist = wordlist;
    for (const auto& entry : embeddings) {
      auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::kInvalidConfig, "--embeddings expects name=path, got '" + entry + "'");
      }
      c.embeddings[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    if (!docfreq.empty()) c.docfreq = docfreq;
    if (!dict.empty()) c.dict = dict;
    if (!babelnet_cache.empty()) c.babelnet_cache = babelnet_cache;
    if (threads) c.threads = *threads;
    if (top_t) c.scoring.top_t = *top_t;
    if (m) c.scoring.m = *m;
    if (lambda_t) c.scoring.lambda_t = *lambda_t;
    if (alpha) c.scoring.alpha = *alpha;
    if (per_team) c.per_team = *per_team;
    if (!index.empty()) c.index = parse_index_mode(index);
    return c;
  }
};

bool parse_on_off(const std::string& s) {
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::kInvalidConfig, "expected on/off, got '" + s + "'");
}

std::string clue_to_text(const ClueResult& r) {
  std::ostringstream out;
  out.precision(17);
  const auto& b = r.breakdown;
  out << "clue: " << r.clue.str() << '\n';
  out << "intended:";
  for (const auto& w : r.intended.words()) out << ' ' << w.str();
  out << '\n';
  out << "config: " << r.representation << (r.detect ? "+DETECT" : "") << '/' << scoring_fn_name(r.scoring_fn)
      << '\n';
  out << "base: " << b.base << '\n';
  out << "freq_term: " << b.freq_term << '\n';
  out << "dict_blue_sum: " << b.dict_blue_sum << '\n';
  out << "dict_red_max: " << b.dict_red_max << '\n';
  out << "detect: " << b.detect << '\n';
  out << "total: " << b.total << '\n';
  out << "kim_constraint_passed: " << (b.kim_constraint_passed ? "true" : "false") << '\n';
  out << "relaxed: " << (b.relaxed ? "true" : "false") << '\n';
  out << "single_word_fallback: " << (r.single_word_fallback ? "true" : "false") << '\n';
  for (const auto& p : r.provenance) out << "path: " << p << '\n';
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Codenames clue-giver engine"};
  app.require_subcommand(1);
  std::string out_path;
  std::uint64_t seed = 0;
  app.add_option("--out", out_path, "write output to this path instead of stdout");
  app.add_option("--seed", seed, "random seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "build resources from raw inputs");
  ingest->require_subcommand(1);

  auto* ing_emb = ingest->add_subcommand("embeddings", "normalize a word-vector file");
  std::string emb_in, emb_name = "embeddings", emb_docfreq;
  std::size_t emb_top = 0;
  ing_emb->add_option("--in", emb_in, "vector file")->required();
  ing_emb->add_option("--name", emb_name, "representation name");
  ing_emb->add_option("--top-common", emb_top, "keep only the k most frequent words");
  ing_emb->add_option("--docfreq", emb_docfreq, "document-frequency table for --top-common");
  ing_emb->add_option("--out", out_path, "output path");

  auto* ing_df = ingest->add_subcommand("docfreq", "count document frequencies");
  std::string df_dir, df_file, df_delim = "---";
  unsigned df_threads = 1;
  ing_df->add_option("--dir", df_dir, "directory of documents, one per file");
  ing_df->add_option("--file", df_file, "single file of delimited documents");
  ing_df->add_option("--delimiter", df_delim, "document delimiter line for --file");
  ing_df->add_option("--threads", df_threads, "worker threads");
  ing_df->add_option("--out", out_path, "output path");

  auto* ing_ctx = ingest->add_subcommand("contexts", "average contextual vectors per token");
  std::string ctx_in, ctx_name = "contextual";
  ing_ctx->add_option("--in", ctx_in, "occurrence file")->required();
  ing_ctx->add_option("--name", ctx_name, "representation name");
  ing_ctx->add_option("--out", out_path, "output path");

  // babelnet fetch
  auto* bn = app.add_subcommand("babelnet", "BabelNet subgraph cache");
  bn->require_subcommand(1);
  auto* fetch = bn->add_subcommand("fetch", "fetch and cache subgraphs for words");
  std::string fetch_words, fetch_cache = "babelnet_cache", fetch_key, fetch_fixture;
  std::size_t fetch_levels = babelnet::kDefaultLevels;
  std::size_t fetch_budget = 1000;
  fetch->add_option("--words", fetch_words, "board file or word list")->required();
  fetch->add_option("--levels", fetch_levels, "query depth");
  fetch->add_option("--cache", fetch_cache, "cache directory");
  fetch->add_option("--key", fetch_key, "API key (default: BABELNET_KEY)");
  fetch->add_option("--fixture-graph", fetch_fixture, "serve requests from a local graph file");
  fetch->add_option("--requests-per-day", fetch_budget, "client-side request budget");

  // board gen
  auto* board = app.add_subcommand("board", "boards");
  board->require_subcommand(1);
  auto* gen = board->add_subcommand("gen", "generate random boards");
  std::string gen_wordlist;
  std::size_t gen_n = 10, gen_count = 1;
  gen->add_option("--wordlist", gen_wordlist, "word list")->required();
  gen->add_option("--n", gen_n, "words per team");
  gen->add_option("--count", gen_count, "number of boards");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out_path, "output path");

  // clue
  auto* clue = app.add_subcommand("clue", "choose a clue for a board");
  EngineFlags clue_flags;
  std::string clue_board, clue_rep, clue_scoring = "ours", clue_detect = "off";
  bool clue_json = false;
  clue_flags.attach(clue);
  clue->add_option("--board", clue_board, "board file")->required();
  clue->add_option("--rep", clue_rep, "representation name")->required();
  clue->add_option("--scoring", clue_scoring, "ours or kim");
  clue->add_option("--detect", clue_detect, "on or off");
  clue->add_flag("--json", clue_json, "print JSON");
  clue->add_option("--out", out_path, "output path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "bot evaluation over generated boards");
  EngineFlags sim_flags;
  std::vector<std::string> sim_configs;
  std::string sim_guesser, sim_trials_out, sim_responses_out, sim_format = "table";
  std::size_t sim_boards = 10;
  sim_flags.attach(sim);
  sim->add_option("--configs", sim_configs, "configs as <rep>[+DETECT]/<ours|kim>")->required();
  sim->add_option("--guesser", sim_guesser, "vector file used by the bot guesser")->required();
  sim->add_option("--boards", sim_boards, "number of boards");
  sim->add_option("--trials-out", sim_trials_out, "write trials (JSONL)");
  sim->add_option("--responses-out", sim_responses_out, "write responses (JSONL)");
  sim->add_option("--format", sim_format, "table or json");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--out", out_path, "output path");

  // eval report
  auto* ev = app.add_subcommand("eval", "evaluation");
  ev->require_subcommand(1);
  auto* report = ev->add_subcommand("report", "metrics over recorded responses");
  std::string rep_trials, rep_format = "table", rep_kind = "human";
  std::vector<std::string> rep_responses;
  report->add_option("--trials", rep_trials, "trials (JSONL or session.json)")->required();
  report->add_option("--responses", rep_responses, "response files (JSONL, repeatable)")->required();
  report->add_option("--format", rep_format, "table or json");
  report->add_option("--evaluation", rep_kind, "human or bot-evaluation");
  report->add_option("--out", out_path, "output path");

  // serve
  auto* serve = app.add_subcommand("serve", "run the evaluation service");
  EngineFlags serve_flags;
  std::string serve_host, serve_sessions, serve_static;
  std::optional<int> serve_port;
  serve_flags.attach(serve);
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "port");
  serve->add_option("--sessions", serve_sessions, "session directory");
  serve->add_option("--static", serve_static, "static asset directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (*ing_emb) {
    LoadStats stats;
    auto in = open_input(emb_in);
    auto store = load_embeddings(in, emb_name, &stats);
    if (emb_top > 0) {
      if (emb_docfreq.empty()) throw Error(ErrorCode::kInvalidConfig, "--top-common needs --docfreq");
      auto df_in = open_input(emb_docfreq);
      store = filter_top_common(store, read_docfreq(df_in), emb_top);
    }
    std::ostringstream out;
    write_embeddings(store, out);
    emit(out_path, out.str());
    std::cerr << "loaded " << stats.loaded << ", kept " << store.size() << ", duplicates " << stats.duplicates
              << ", unparseable " << stats.unparseable << ", zero vectors " << stats.zero_vectors << '\n';
    return 0;
  }
  if (*ing_df) {
    if (df_dir.empty() == df_file.empty()) throw Error(ErrorCode::kInvalidConfig, "give exactly one of --dir, --file");
    std::vector<std::string> texts;
    if (!df_dir.empty()) {
      texts = read_corpus_directory(df_dir);
    } else {
      auto in = open_input(df_file);
      texts = read_corpus_delimited(in, df_delim);
    }
    auto table = ingest_texts(texts, df_threads);
    std::ostringstream out;
    write_docfreq(table, out);
    emit(out_path, out.str());
    return 0;
  }
  if (*ing_ctx) {
    auto in = open_input(ctx_in);
    auto store = average_contexts(in, ctx_name);
    std::ostringstream out;
    write_embeddings(store, out);
    emit(out_path, out.str());
    return 0;
  }
  if (*fetch) {
    auto words = read_words_file(fetch_words);
    std::shared_ptr<babelnet::GraphSource> upstream;
    if (!fetch_fixture.empty()) {
      upstream = babelnet::load_fixture_graph(fs::path(fetch_fixture));
    } else if (!babelnet::resolve_api_key(fetch_key).empty()) {
      babelnet::ClientOptions options;
      options.key = fetch_key;
      options.requests_per_day = fetch_budget;
      upstream = std::make_shared<babelnet::BabelNetClient>(options);
    }
    babelnet::CachingGraphSource source(upstream, fetch_cache);
    babelnet::SubgraphCache cache(fetch_cache);
    std::size_t fetched = 0;
    for (const auto& w : words) {
      babelnet::ensure_cached(w, fetch_levels, source, cache);
      ++fetched;
    }
    std::cerr << "cached " << fetched << " words in " << fetch_cache << '\n';
    return 0;
  }
  if (*gen) {
    auto in = open_input(gen_wordlist);
    auto wordlist = read_wordlist(in);
    SeededRng rng(seed);
    std::string text;
    for (std::size_t i = 0; i < gen_count; ++i) {
      const auto board_seed = gen_count == 1 ? seed : rng.next();
      if (gen_count > 1) text += (i ? "\n# board " : "# board ") + std::to_string(i) + "\n";
      text += format_board(generate_board(wordlist, gen_n, board_seed));
    }
    emit(out_path, text);
    return 0;
  }
  if (*clue) {
    auto engine = build_engine(clue_flags.resolve());
    auto board_value = read_board_file(clue_board);
    TrialConfig config{clue_rep, parse_scoring_fn(clue_scoring), parse_on_off(clue_detect)};
    auto result = engine->give_clue(board_value, config);
    emit(out_path, clue_json ? clue_to_json(result).dump(2) + "\n" : clue_to_text(result));
    return 0;
  }
  if (*sim) {
    auto engine = build_engine(sim_flags.resolve());
    auto guesser_in = open_input(sim_guesser);
    auto guesser = load_embeddings(guesser_in, fs::path(sim_guesser).stem().string());
    CreateSessionRequest request;
    request.board_count = sim_boards;
    request.seed = seed;
    for (const auto& c : sim_configs) request.configs.push_back(parse_trial_config(c));
    auto trials = build_trials(*engine, request, "sim" + std::to_string(seed));
    std::vector<std::pair<TrialResponse, Trial>> joined;
    std::string trials_text, responses_text;
    for (const auto& t : trials) {
      auto r = simulate_guesser(guesser, t);
      trials_text += trial_to_json(t).dump() + "\n";
      responses_text += response_to_json(r).dump() + "\n";
      joined.emplace_back(std::move(r), t);
    }
    if (!sim_trials_out.empty()) emit(sim_trials_out, trials_text);
    if (!sim_responses_out.empty()) emit(sim_responses_out, responses_text);
    auto metrics = aggregate(joined, "bot-evaluation");
    emit(out_path, sim_format == "json" ? report_to_json(metrics).dump(2) + "\n" : render_report_table(metrics));
    return 0;
  }
  if (*report) {
    std::vector<Trial> trials;
    {
      auto in = open_input(rep_trials);
      if (fs::path(rep_trials).extension() == ".json") {
        auto doc = nlohmann::json::parse(in);
        for (const auto& t : doc.at("trials")) trials.push_back(trial_from_json(t));
      } else {
        trials = read_trials(in);
      }
    }
    std::vector<TrialResponse> responses;
    for (const auto& path : rep_responses) {
      auto in = open_input(path);
      auto part = read_responses(in);
      responses.insert(responses.end(), part.begin(), part.end());
    }
    auto metrics = aggregate(join_responses(responses, trials), rep_kind);
    emit(out_path, rep_format == "json" ? report_to_json(metrics).dump(2) + "\n" : render_report_table(metrics));
    return 0;
  }
  if (*serve) {
    auto config = serve_flags.resolve();
    if (!serve_host.empty()) config.host = serve_host;
    if (serve_port) config.port = *serve_port;
    if (!serve_sessions.empty()) config.sessions_dir = serve_sessions;
    if (!serve_static.empty()) config.static_dir = serve_static;
    auto engine = build_engine(config);
    SessionStore store(config.sessions_dir, engine);
    HttpService http(store, config.static_dir);
    std::cerr << "listening on " << config.host << ':' << config.port << '\n';
    if (!http.listen(config.host, config.port)) {
      throw Error(ErrorCode::kIoError, "cannot bind " + config.host + ":" + std::to_string(config.port));
    }
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  }
}
