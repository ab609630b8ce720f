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
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "codenames/babelnet/graph.hpp"
#include "codenames/core.hpp"
#include "codenames/corpusfreq.hpp"
#include "codenames/embeddings.hpp"
#include "codenames/error.hpp"

namespace codenames {

enum class ScoringFn { kOurs, kKim };

inline std::string_view scoring_fn_name(ScoringFn fn) { return fn == ScoringFn::kOurs ? "ours" : "kim"; }

inline ScoringFn parse_scoring_fn(std::string_view s) {
  if (s == "ours" || s == "g") return ScoringFn::kOurs;
  if (s == "kim" || s == "gkim" || s == "g_kim") return ScoringFn::kKim;
  throw Error(ErrorCode::kInvalidConfig, "unknown scoring function '" + std::string(s) + "'");
}

struct ScoringParams {
  double lambda_b = 1.0;
  double lambda_r = 0.5;
  // Threshold of the constrained (kim) scorer. No published value exists;
  // raise it to make that scorer more conservative.
  double lambda_t = 0.3;
  double lambda_f = 2.0;
  // Use 1.0 for a store filtered to the most common words.
  double lambda_d = 2.0;
  double alpha = 1.0 / 1667.0;
  babelnet::LabelWeights weights;
  babelnet::LabelMode label_mode = babelnet::LabelMode::kOverwrite;
  std::size_t top_t = 500;
  std::size_t m = 2;
  std::size_t levels = 3;

  void validate() const {
    if (lambda_b < 0 || lambda_r < 0 || lambda_f < 0 || lambda_d < 0) {
      throw Error(ErrorCode::kInvalidConfig, "lambda parameters must be non-negative");
    }
    if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorCode::kInvalidConfig, "alpha must be in (0, 1]");
    if (m < 1) throw Error(ErrorCode::kInvalidConfig, "m must be at least 1");
    if (top_t < 1) throw Error(ErrorCode::kInvalidConfig, "T must be at least 1");
    if (levels < 1) throw Error(ErrorCode::kInvalidConfig, "L must be at least 1");
    weights.validate();
  }

  FreqParams freq() const { return FreqParams{alpha}; }
};

// s(candidate, w) for the intended words and for every red word. std::map
// keeps iteration in ascending token order, which fixes the summation order.
struct SimilarityProfile {
  WordToken clue;
  std::map<WordToken, double> blue_sims;
  std::map<WordToken, double> red_sims;
};

struct ScoreBreakdown {
  double base = 0.0;
  double freq_term = 0.0;
  double dict_blue_sum = 0.0;
  double dict_red_max = 0.0;
  double detect = 0.0;
  double total = 0.0;
  bool kim_constraint_passed = true;
  // The constrained scorer found no passing candidate on the board and
  // ranked by minimum blue similarity instead.
  bool relaxed = false;

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

inline constexpr double kRejectedScore = std::numeric_limits<double>::lowest();

namespace detail {

inline double max_or_zero(const std::map<WordToken, double>& sims) {
  if (sims.empty()) return 0.0;
  double best = sims.begin()->second;
  for (const auto& [_, s] : sims) best = std::max(best, s);
  return best;
}

inline double min_blue(const std::map<WordToken, double>& sims) {
  if (sims.empty()) throw Error(ErrorCode::kInvalidConfig, "profile has no intended words");
  double best = sims.begin()->second;
  for (const auto& [_, s] : sims) best = std::min(best, s);
  return best;
}

}  // namespace detail

// lambda_B * sum_b s(c,b) - lambda_R * max_r s(c,r); an empty red team adds no
// penalty.
inline double score_g(const SimilarityProfile& profile, const ScoringParams& params) {
  double blue = 0.0;
  for (const auto& [_, s] : profile.blue_sims) blue += s;
  return params.lambda_b * blue - params.lambda_r * detail::max_or_zero(profile.red_sims);
}

struct KimScore {
  double score = 0.0;
  bool passed = false;
};

// min_b s(c,b) when it exceeds both lambda_T and every red similarity, else 0.
inline KimScore score_gkim(const SimilarityProfile& profile, const ScoringParams& params) {
  const double lo = detail::min_blue(profile.blue_sims);
  const bool passed = lo > params.lambda_t && lo > detail::max_or_zero(profile.red_sims);
  return KimScore{passed ? lo : 0.0, passed};
}

// DICT: cosine distance in the dictionary embedding. Pairs with an unknown
// word are maximally distant (1.0).
inline double dict_relatedness(const EmbeddingStore* dict, const WordToken& w1, const WordToken& w2) {
  if (!dict) return 1.0;
  auto a = dict->index_of(w1);
  auto b = dict->index_of(w2);
  if (!a || !b) return 1.0;
  return 1.0 - dict->cosine(*a, *b);
}

inline double dict_relatedness(const EmbeddingStore& dict, const WordToken& w1, const WordToken& w2) {
  return dict_relatedness(&dict, w1, w2);
}

struct DetectTerms {
  double freq_term = 0.0;
  double dict_blue_sum = 0.0;
  double dict_red_max = 0.0;
  double detect = 0.0;
};

// Combines the components exactly as the breakdown stores them.
inline double combine_detect(double freq_term, double dict_blue_sum, double dict_red_max,
                             const ScoringParams& params) {
  return params.lambda_f * freq_term + params.lambda_d * (dict_blue_sum - dict_red_max);
}

inline DetectTerms detect_terms(const WordToken& clue, const IntendedPair& intended, const TokenList& red,
                                const DocFreqTable& df, const EmbeddingStore* dict,
                                const ScoringParams& params) {
  DetectTerms t;
  t.freq_term = freq_score(df, clue, params.freq());
  for (const auto& b : intended.words()) t.dict_blue_sum += 1.0 - dict_relatedness(dict, clue, b);
  bool any = false;
  for (const auto& r : red) {
    double rel = 1.0 - dict_relatedness(dict, clue, r);
    t.dict_red_max = any ? std::max(t.dict_red_max, rel) : rel;
    any = true;
  }
  t.detect = combine_detect(t.freq_term, t.dict_blue_sum, t.dict_red_max, params);
  return t;
}

// lambda_F * FREQ(c) + lambda_D * (sum_b (1 - DICT(c,b)) - max_r (1 - DICT(c,r))).
inline double detect_score(const WordToken& clue, const IntendedPair& intended, const TokenList& red,
                           const DocFreqTable& df, const EmbeddingStore* dict, const ScoringParams& params) {
  return detect_terms(clue, intended, red, df, dict, params).detect;
}

// Final ranking value. The constrained scorer keeps failing candidates at
// kRejectedScore, so DETECT can never promote a clue that broke a constraint.
inline double total_score(double base, bool passed, double detect, ScoringFn fn, bool detect_enabled,
                          bool relaxed = false) {
  const double extra = detect_enabled ? detect : 0.0;
  if (fn == ScoringFn::kKim && !passed && !relaxed) return kRejectedScore;
  return base + extra;
}

inline double recompute_total(const ScoreBreakdown& b, ScoringFn fn, bool detect_enabled) {
  return total_score(b.base, b.kim_constraint_passed, b.detect, fn, detect_enabled, b.relaxed);
}

}  // namespace codenames
