// SPDX-License-Identifier: Apache-2.0
#include <set>

#include <gtest/gtest.h>

#include "rankarena/datagen.hpp"
#include "rankarena/error.hpp"
#include "rankarena/mock_providers.hpp"
#include "support.hpp"

namespace rankarena {
namespace {

using testing::scripted;

TEST(Sg, OneTripletPerQueryWithChosenAhead) {
  const auto topics = testing::synthetic_topics(4);
  MockChatProvider chat;
  TermFrequencyScorer scorer;
  SgOptions o;
  o.samples = 5;
  o.model = "mock";
  const auto r = generate_sg(topics, chat, scorer, o);
  ASSERT_EQ(r.triplets.size(), 4u);
  EXPECT_EQ(r.stats.skipped, 0u);
  for (const auto& t : r.triplets) {
    EXPECT_GE(scorer.score(Query{t.meta.query_id, t.meta.query}, t.chosen),
              scorer.score(Query{t.meta.query_id, t.meta.query}, t.rejected));
    EXPECT_NE(t.chosen, t.rejected);
    EXPECT_DOUBLE_EQ(t.meta.temperature, 0.8);
    EXPECT_EQ(t.meta.sample_count, 5);
    EXPECT_EQ(t.meta.source, TripletSource::Sg);
    EXPECT_NE(t.prompt.find("Edited Document:"), std::string::npos);
  }
  EXPECT_NO_THROW(verify_rescoring(r.triplets, scorer));
}

TEST(Sg, SamplesUseDistinctIndicesAndTheSamePrompt) {
  std::vector<ChatRequest> seen;
  std::mutex m;
  FunctionChatProvider chat([&](const ChatRequest& r) {
    std::lock_guard lock(m);
    seen.push_back(r);
    return "sample " + std::to_string(r.sample_index) + " " + std::string(r.sample_index, 'x');
  });
  TermFrequencyScorer scorer;
  SgOptions o;
  o.samples = 4;
  o.generate_initial = false;
  o.model = "m";
  const auto r = generate_sg(testing::synthetic_topics(1), chat, scorer, o);
  ASSERT_EQ(seen.size(), 4u);
  std::set<std::uint64_t> idx;
  for (const auto& req : seen) {
    idx.insert(req.sample_index);
    EXPECT_EQ(req.prompt, seen.front().prompt);
  }
  EXPECT_EQ(idx.size(), 4u);
  ASSERT_EQ(r.triplets.size(), 1u);
  EXPECT_EQ(r.triplets[0].prompt, seen.front().prompt);
}

TEST(Sg, IdenticalSamplesAreSkipped) {
  FunctionChatProvider chat([](const ChatRequest&) { return std::string("always the same"); });
  TermFrequencyScorer scorer;
  SgOptions o;
  o.samples = 2;
  o.model = "m";
  const auto r = generate_sg(testing::synthetic_topics(1), chat, scorer, o);
  EXPECT_TRUE(r.triplets.empty());
  EXPECT_EQ(r.stats.skipped, 1u);
}

TEST(Sg, NeedsTwoSamples) {
  MockChatProvider chat;
  TermFrequencyScorer scorer;
  SgOptions o;
  o.samples = 1;
  EXPECT_THROW(generate_sg(testing::synthetic_topics(1), chat, scorer, o), ValidationError);
}

CompetitionConfig dg_config() {
  CompetitionConfig c;
  c.roster = {scripted("winner", Strategy::KeywordStuff), scripted("mid", Strategy::Noop),
              scripted("loser", Strategy::Noop)};
  c.rounds = 30;
  c.prompt_kind = PromptKind::Lsw;
  return c;
}

/// Scores by query-term count but pushes the "loser" agent's text to the bottom.
class RiggedScorer final : public Scorer {
 public:
  double score(const Query& q, std::string_view doc) const override {
    return doc.starts_with("LOSER") ? -1.0 : tf_.score(q, doc);
  }
  std::string describe() const override { return "rigged"; }

 private:
  TermFrequencyScorer tf_;
};

TEST(Dg, DefaultRoundSelection) {
  EXPECT_EQ(default_round_select(PromptKind::Lsw), std::vector<int>{3});
  EXPECT_EQ(default_round_select(PromptKind::Paw), std::vector<int>{4});
}

TEST(Dg, ChosenAndRejectedComeFromTheRankedExtremes) {
  auto c = dg_config();
  c.roster[2] = testing::llm("loser", "m");
  GameServices s;
  s.scorer = std::make_shared<RiggedScorer>();
  auto chat = std::make_shared<FunctionChatProvider>(
      [](const ChatRequest& r) { return "LOSER text " + std::to_string(r.sample_index % 97); });
  s.chat_for = [chat](const AgentSpec&) { return chat; };
  const auto topics = testing::synthetic_topics(3);
  const auto r = generate_dg(topics, c, s);
  ASSERT_EQ(r.triplets.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& t = r.triplets[i];
    const auto& game = r.log.games[i];
    EXPECT_EQ(t.meta.round, 3);
    EXPECT_EQ(game.rounds.size(), 3u);  // stopped at the last selected round
    EXPECT_EQ(t.chosen, game.at_round(3).documents.at("winner").text);
    EXPECT_EQ(t.rejected, game.at_round(3).documents.at("loser").text);
    EXPECT_EQ(t.prompt, game.at_round(3).documents.at("winner").prompt);
    EXPECT_EQ(t.meta.source, TripletSource::Dg);
  }
  EXPECT_NO_THROW(verify_rescoring(r.triplets, RiggedScorer{}));
}

TEST(Dg, FocalAgentIsConfigurable) {
  auto c = dg_config();
  GameServices s;
  s.scorer = std::make_shared<TermFrequencyScorer>();
  DgOptions o;
  o.focal_agent = "mid";
  o.round_select = {1, 2};
  const auto r = generate_dg(testing::synthetic_topics(1), c, s, o);
  for (const auto& t : r.triplets) {
    EXPECT_EQ(t.prompt, r.log.games[0].at_round(t.meta.round).documents.at("mid").prompt);
  }
  o.focal_agent = "ghost";
  EXPECT_THROW(generate_dg(testing::synthetic_topics(1), c, s, o), ValidationError);
}

TEST(Dg, RoundOneRendersAvailableHistory) {
  auto c = dg_config();
  GameServices s;
  s.scorer = std::make_shared<TermFrequencyScorer>();
  DgOptions o;
  o.round_select = {1};
  const auto r = generate_dg(testing::synthetic_topics(1), c, s, o);
  ASSERT_EQ(r.triplets.size(), 1u);
  EXPECT_NE(r.triplets[0].prompt.find("last 1 round(s)"), std::string::npos);
}

TEST(Dg, RoundBeyondHorizonIsAnError) {
  auto c = dg_config();
  c.rounds = 5;
  GameServices s;
  s.scorer = std::make_shared<TermFrequencyScorer>();
  DgOptions o;
  o.round_select = {6};
  EXPECT_THROW(generate_dg(testing::synthetic_topics(1), c, s, o), ValidationError);
}

TEST(Dg, AllIdenticalRoundsAreSkipped) {
  CompetitionConfig c;
  c.roster = {scripted("a", Strategy::Noop), scripted("b", Strategy::Noop)};
  c.rounds = 5;
  GameServices s;
  s.scorer = std::make_shared<TermFrequencyScorer>();
  const auto r = generate_dg(testing::synthetic_topics(2), c, s);
  EXPECT_TRUE(r.triplets.empty());
  EXPECT_EQ(r.stats.skipped, 2u);
}

TEST(Split, NinetyTenAndDeterministic) {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("q" + std::to_string(i));
  const auto a = split_queries(ids, 42);
  EXPECT_EQ(a.train.size(), 9u);
  EXPECT_EQ(a.test.size(), 1u);
  std::reverse(ids.begin(), ids.end());
  const auto b = split_queries(ids, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::string> all(a.train.begin(), a.train.end());
  for (const auto& t : a.test) EXPECT_FALSE(all.contains(t));
}

PreferenceTriplet triplet(const std::string& qid, const std::string& chosen) {
  PreferenceTriplet t;
  t.prompt = "prompt for " + qid;
  t.chosen = chosen;
  t.rejected = "rejected";
  t.meta.query_id = qid;
  t.meta.chosen_score = 2;
  t.meta.rejected_score = 1;
  return t;
}

TEST(WriteDataset, SplitsDedupesAndRecordsHyperparameters) {
  testing::TempDir dir;
  std::vector<PreferenceTriplet> ts;
  for (int i = 0; i < 10; ++i) ts.push_back(triplet("q" + std::to_string(i), "c"));
  ts.push_back(ts.front());
  const auto m = write_dataset(ts, dir.path(), 7, "fp");
  EXPECT_EQ(m.triplet_count, 10u);
  EXPECT_EQ(m.duplicates_removed, 1u);
  EXPECT_EQ(m.train_count, 9u);
  EXPECT_EQ(m.test_count, 1u);
  const auto train = read_triplets(dir / "train.jsonl");
  const auto test = read_triplets(dir / "test.jsonl");
  EXPECT_EQ(train.size(), 9u);
  EXPECT_EQ(test.size(), 1u);
  EXPECT_EQ(test[0].meta.query_id, m.split.test[0]);
  const auto manifest = nlohmann::json::parse(testing::slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("advisory_hyperparameters").at("beta"), 0.1);
  EXPECT_EQ(manifest.at("advisory_hyperparameters").at("learning_rate"), 1e-6);
  EXPECT_EQ(manifest.at("fingerprint"), "fp");
}

TEST(WriteDataset, EmptyInputWritesEmptyFiles) {
  testing::TempDir dir;
  const auto m = write_dataset({}, dir.path(), 1, "fp");
  EXPECT_EQ(m.triplet_count, 0u);
  EXPECT_EQ(testing::slurp(dir / "train.jsonl"), "");
  EXPECT_EQ(testing::slurp(dir / "test.jsonl"), "");
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
}

TEST(WriteDataset, InvariantViolationNamesTheIndex) {
  testing::TempDir dir;
  std::vector<PreferenceTriplet> ts{triplet("q1", "c"), triplet("q2", "rejected")};
  try {
    write_dataset(ts, dir.path(), 1, "fp");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("triplet 1"), std::string::npos) << e.what();
  }
}

TEST(Triplet, JsonRoundTrip) {
  auto t = triplet("q1", "c");
  t.meta.source = TripletSource::Dg;
  t.meta.round = 3;
  t.meta.ranker = "bm25";
  EXPECT_EQ(triplet_from_json(to_json(t)), t);
  EXPECT_EQ(to_json(t).at("meta").at("source"), "DG");
}

}  // namespace
}  // namespace rankarena
