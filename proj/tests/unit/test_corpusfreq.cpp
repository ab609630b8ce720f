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

#include <cmath>
#include <fstream>
#include <sstream>

#include "codenames/corpusfreq.hpp"
#include "codenames/rng.hpp"
#include "support/fixtures.hpp"

namespace codenames {
namespace {

using testing::TempDir;
using testing::tok;
using testing::toks;

TEST(IngestCorpus, CountsDocumentsNotOccurrences) {
  auto t = ingest_corpus({toks({"a", "b"}), toks({"a"})});
  EXPECT_EQ(t.total_docs(), 2u);
  EXPECT_EQ(t.df(tok("a")), 2u);
  EXPECT_EQ(t.df(tok("b")), 1u);
  EXPECT_EQ(t.df(tok("c")), std::nullopt);

  auto repeated = ingest_corpus({toks({"x", "x", "x", "x", "x"})});
  EXPECT_EQ(repeated.df(tok("x")), 1u);
}

TEST(IngestCorpus, EmptyCorpusIsAnError) {
  try {
    ingest_corpus({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(Tokenize, SplitsOnNonLettersAndLowercases) {
  EXPECT_EQ(tokenize_document("The cat's 2 hats, THE end"), toks({"the", "cat", "s", "hats", "the", "end"}));
  EXPECT_TRUE(tokenize_document("123 -- !!").empty());
}

std::vector<std::string> random_texts(std::uint64_t seed, int n) {
  SeededRng rng(seed);
  std::vector<std::string> texts;
  for (int i = 0; i < n; ++i) {
    std::string doc;
    const auto words = rng.below(40);
    for (std::uint64_t w = 0; w < words; ++w) {
      doc += testing::random_word(rng, 1, 3);
      doc += rng.below(5) == 0 ? ". " : " ";
    }
    texts.push_back(doc);
  }
  return texts;
}

TEST(IngestCorpus, ShardedIngestionEqualsSequential) {
  auto texts = random_texts(9, 300);
  auto sequential = ingest_texts(texts, 1);
  for (unsigned threads : {2u, 3u, 8u}) EXPECT_EQ(ingest_texts(texts, threads), sequential) << threads;
}

TEST(IngestCorpus, PermutationInvariant) {
  auto texts = random_texts(10, 200);
  auto ref = ingest_texts(texts);
  SeededRng rng(1);
  for (int k = 0; k < 10; ++k) {
    rng.shuffle(texts);
    EXPECT_EQ(ingest_texts(texts), ref);
  }
}

TEST(IngestCorpus, MatchesNaiveCount) {
  auto texts = random_texts(12, 150);
  auto table = ingest_texts(texts, 4);
  std::map<std::string, std::uint64_t> naive;
  for (const auto& t : texts) {
    std::set<std::string> seen;
    for (const auto& w : tokenize_document(t)) seen.insert(w.str());
    for (const auto& w : seen) ++naive[w];
  }
  ASSERT_EQ(table.size(), naive.size());
  for (const auto& [w, n] : naive) EXPECT_EQ(table.df(tok(w)), n) << w;
}

TEST(CorpusReaders, DirectoryAndDelimitedFile) {
  TempDir dir;
  std::ofstream(dir / "b.txt") << "gold silver";
  std::ofstream(dir / "a.txt") << "gold lemon";
  auto docs = read_corpus_directory(dir.path());
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0], "gold lemon");

  std::istringstream in("gold lemon\n---\ngold silver\n---\n");
  auto delimited = read_corpus_delimited(in, "---");
  ASSERT_EQ(delimited.size(), 2u);
  EXPECT_EQ(ingest_texts(delimited), ingest_texts(docs));
}

TEST(DocFreqPersistence, RoundTripAndFormat) {
  auto t = ingest_corpus({toks({"b", "a"}), toks({"a"})});
  std::ostringstream out;
  write_docfreq(t, out);
  EXPECT_EQ(out.str(), "#totaldocs\t2\na\t2\nb\t1\n");
  std::istringstream in(out.str());
  EXPECT_EQ(read_docfreq(in), t);
}

TEST(DocFreqPersistence, RejectsBadRecords) {
  for (const char* text : {"a\t1\n", "#totaldocs\t2\na\tx\n", "#totaldocs\t2\na\t3\n", "#totaldocs\t2\na 1\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_docfreq(in), Error) << text;
  }
}

DocFreqTable single(std::uint64_t df, std::uint64_t total = 10000) {
  return DocFreqTable({{tok("w"), df}}, total);
}

TEST(FreqScore, WorkedValues) {
  FreqParams p;
  EXPECT_EQ(freq_score(single(1), tok("w"), p), -1.0);
  EXPECT_EQ(freq_score(single(100), tok("w"), p), -0.01);
  EXPECT_EQ(freq_score(single(2000), tok("w"), p), -1.0);
  EXPECT_EQ(freq_score(single(5), tok("unknown"), p), -1.0);
}

TEST(FreqScore, BoundaryOfTheCommonBand) {
  FreqParams p;
  EXPECT_EQ(freq_score(single(1667), tok("w"), p), -1.0 / 1667.0);
  EXPECT_EQ(freq_score(single(1668), tok("w"), p), -1.0);
}

TEST(FreqScore, RangeAndMonotonicityOverSweep) {
  SeededRng rng(4);
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t limit = 1 + rng.below(3000);
    FreqParams p{1.0 / static_cast<double>(limit)};
    double prev = -2;
    for (std::uint64_t df = 1; df <= 4000; ++df) {
      const double f = freq_score(single(df), tok("w"), p);
      ASSERT_GE(f, -1.0);
      ASSERT_LE(f, -p.alpha);
      if (df <= limit) {
        ASSERT_GE(f, prev) << df;
        prev = f;
      } else {
        ASSERT_EQ(f, -1.0) << df;
      }
    }
  }
}

}  // namespace
}  // namespace codenames
