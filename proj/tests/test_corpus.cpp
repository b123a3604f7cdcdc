// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include <gtest/gtest.h>

#include "rankarena/corpus.hpp"
#include "rankarena/error.hpp"
#include "support.hpp"

namespace rankarena {
namespace {

using Terms = std::vector<std::string>;

TEST(SplitTerms, LowercasesAndSplitsOnHyphens) {
  EXPECT_EQ(split_terms("E5-unsupervised ranker"), (Terms{"e5", "unsupervised", "ranker"}));
}

TEST(SplitTerms, PunctuationAndUnicodeSeparators) {
  EXPECT_EQ(split_terms("Hello, world! (tests)"), (Terms{"hello", "world", "tests"}));
  EXPECT_EQ(split_terms("a b—c、d"), (Terms{"a", "b", "c", "d"}));
  EXPECT_EQ(split_terms("café naïve"), (Terms{"café", "naïve"}));
  EXPECT_TRUE(split_terms("  ...  ").empty());
}

TEST(Tokenize, StemsEachTerm) {
  EXPECT_EQ(tokenize("E5-unsupervised ranker"),
            (Terms{"e5", stem("unsupervised"), "ranker"}));
  EXPECT_EQ(tokenize("Running runs RUN"), (Terms{"run", "run", "run"}));
}

TEST(Stem, InflectionalForms) {
  EXPECT_EQ(stem("cats"), "cat");
  EXPECT_EQ(stem("ponies"), "pony");
  EXPECT_EQ(stem("classes"), "class");
  EXPECT_EQ(stem("boxes"), "box");
  EXPECT_EQ(stem("walked"), "walk");
  EXPECT_EQ(stem("hopping"), "hop");
  EXPECT_EQ(stem("making"), "make");
  EXPECT_EQ(stem("agreed"), "agree");
}

TEST(Stem, LeavesShortAndInvariantWordsAlone) {
  EXPECT_EQ(stem("is"), "is");
  EXPECT_EQ(stem("gas"), "gas");
  EXPECT_EQ(stem("glass"), "glass");
  EXPECT_EQ(stem("status"), "status");
  EXPECT_EQ(stem("analysis"), "analysis");
  EXPECT_EQ(stem("sing"), "sing");
  EXPECT_EQ(stem("e5"), "e5");
}

TEST(Stem, Idempotent) {
  for (const char* w : {"running", "studies", "walked", "boxes", "hoping", "ranker", "agreed"}) {
    const auto once = stem(w);
    EXPECT_EQ(stem(once), once) << w;
  }
}

TEST(WordCount, WhitespaceSeparated) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("  one\ttwo\nthree  "), 3u);
  EXPECT_EQ(word_count("e5-unsupervised, ranker."), 2u);
}

TEST(FirstWords, KeepsOriginalSpacing) {
  EXPECT_EQ(first_words("a  b   c d", 3), "a  b   c");
  EXPECT_EQ(first_words("a b", 5), "a b");
  EXPECT_EQ(first_words("  lead b", 1), "  lead");
}

TEST(CorpusStats, DocumentFrequencyCountsDocumentsNotOccurrences) {
  const std::vector<std::string> docs{"a b", "a", "b b b"};
  const auto stats = compute_stats(docs);
  EXPECT_EQ(stats.doc_count(), 3u);
  EXPECT_EQ(stats.df("a"), 2u);
  EXPECT_EQ(stats.df("b"), 2u);
  EXPECT_EQ(stats.df("zzz"), 0u);
  EXPECT_DOUBLE_EQ(stats.avg_doc_len(), 2.0);
}

TEST(CorpusStats, RejectsInvalidInput) {
  EXPECT_THROW(compute_stats(std::vector<std::string>{}), ValidationError);
  EXPECT_THROW(CorpusStats(0, {}, 1.0), ValidationError);
  EXPECT_THROW(CorpusStats(1, {{"a", 2}}, 1.0), ValidationError);
  EXPECT_THROW(CorpusStats(1, {}, 0.0), ValidationError);
}

TEST(Topics, ParsesJsonLines) {
  std::istringstream in(
      R"({"query_id":"q1","query":"solar","seed_doc":"Panels work."})"
      "\n\n"
      R"({"query_id":"q2","query":"wind","seed_doc":"Turbines spin fast."})"
      "\n");
  const auto topics = parse_topics(in, "topics.jsonl");
  ASSERT_EQ(topics.size(), 2u);
  EXPECT_EQ(topics[1].query.id, "q2");
  EXPECT_EQ(topics[1].seed.word_count, 3u);
  EXPECT_EQ(topics[1].seed.query_id, "q2");
}

TEST(Topics, ErrorsNameTheLine) {
  std::istringstream bad_json("{\"query_id\":\"q1\",\"query\":\"a\",\"seed_doc\":\"b\"}\n{oops\n");
  try {
    parse_topics(bad_json, "t.jsonl");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("t.jsonl:2"), std::string::npos) << e.what();
  }
  std::istringstream missing(R"({"query_id":"q1","query":"a"})");
  EXPECT_THROW(parse_topics(missing, "t"), ParseError);
  std::istringstream dup(
      R"({"query_id":"q1","query":"a","seed_doc":"b"})"
      "\n"
      R"({"query_id":"q1","query":"c","seed_doc":"d"})");
  EXPECT_THROW(parse_topics(dup, "t"), ValidationError);
  std::istringstream empty(R"({"query_id":"q1","query":"","seed_doc":"b"})");
  EXPECT_THROW(parse_topics(empty, "t"), ValidationError);
}

TEST(Topics, ShippedSampleLoads) {
  const auto topics = load_topics(std::string(RANKARENA_SOURCE_DIR) + "/data/topics.jsonl");
  EXPECT_EQ(topics.size(), 10u);
  const auto corpus = load_corpus_texts(std::string(RANKARENA_SOURCE_DIR) + "/data/corpus.jsonl");
  EXPECT_EQ(corpus.size(), 20u);
}

}  // namespace
}  // namespace rankarena
