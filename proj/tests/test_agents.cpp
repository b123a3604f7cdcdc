// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>

#include <gtest/gtest.h>

#include "rankarena/agents.hpp"
#include "rankarena/error.hpp"
#include "rankarena/mock_providers.hpp"
#include "support.hpp"

namespace rankarena {
namespace {

HistoryRound round_of(int round, std::map<std::string, std::string> docs,
                      std::vector<std::string> order) {
  HistoryRound h;
  h.round = round;
  h.documents = std::move(docs);
  h.ranking.round = round;
  for (const auto& a : order) h.ranking.entries.push_back({a + ":" + std::to_string(round), a, 0.0});
  return h;
}

PromptContext three_round_context(PromptKind kind) {
  PromptContext ctx;
  ctx.query = Query{"q7", "electric car battery"};
  ctx.own_agent_id = "me";
  ctx.kind = kind;
  ctx.history = {
      round_of(0, {{"me", "Seed text."}, {"x", "Seed text."}, {"y", "Seed text."}},
               {"x", "me", "y"}),
      round_of(1, {{"me", "My round one."}, {"x", "X round one."}, {"y", "Y round one."}},
               {"y", "x", "me"}),
      round_of(2, {{"me", "My round two."}, {"x", "X round two."}, {"y", "Y round two."}},
               {"me", "y", "x"}),
  };
  return ctx;
}

TEST(BuildPrompt, ListwiseMatchesGoldenFile) {
  const auto prompt = build_prompt(three_round_context(PromptKind::Lsw));
  const auto golden = std::string(RANKARENA_GOLDEN_DIR) + "/lsw_round2.txt";
  if (std::getenv("RANKARENA_UPDATE_GOLDEN")) testing::spit(golden, prompt);
  EXPECT_EQ(prompt, testing::slurp(golden));
}

TEST(BuildPrompt, ListwiseShowsLastTwoRoundsWithoutAgentIds) {
  const auto prompt = build_prompt(three_round_context(PromptKind::Lsw));
  EXPECT_EQ(prompt.find("Round 0:"), std::string::npos);
  EXPECT_NE(prompt.find("Round 1:"), std::string::npos);
  EXPECT_NE(prompt.find("Round 2:\n  Rank 1 (your document): My round two."), std::string::npos);
  EXPECT_NE(prompt.find("last 2 round(s)"), std::string::npos);
  EXPECT_EQ(prompt.find(" x"), std::string::npos);
  EXPECT_NE(prompt.find(" - Candidate Document: My round two."), std::string::npos);
}

TEST(BuildPrompt, ShortHistoryRendersWhatExists) {
  auto ctx = three_round_context(PromptKind::Lsw);
  ctx.history.resize(1);
  const auto prompt = build_prompt(ctx);
  EXPECT_NE(prompt.find("last 1 round(s)"), std::string::npos);
  EXPECT_NE(prompt.find("Round 0:\n  Rank 1: Seed text.\n  Rank 2 (your document): Seed text."),
            std::string::npos);
  ctx.history.clear();
  ctx.current_document = "Doc";
  EXPECT_THROW(build_prompt(ctx), ValidationError);
}

TEST(BuildPrompt, PairwiseComparesAgainstLatestLeader) {
  const auto prompt = build_prompt(three_round_context(PromptKind::Paw));
  // We lead round 2, so the partner is round 2's rank-2 agent "y".
  EXPECT_NE(prompt.find("Round 0:\n  Ranked higher (your document): Seed text.\n  Ranked lower: "
                        "Seed text."),
            std::string::npos);
  EXPECT_NE(prompt.find("Round 1:\n  Ranked higher: Y round one.\n  Ranked lower (your document): "
                        "My round one."),
            std::string::npos);
  EXPECT_NE(prompt.find("Round 2:\n  Ranked higher (your document): My round two.\n  Ranked "
                        "lower: Y round two."),
            std::string::npos);
  EXPECT_EQ(prompt.find("X round"), std::string::npos);
}

TEST(BuildPrompt, InitAndNoFeedback) {
  PromptContext ctx;
  ctx.query = Query{"q", "tomato soil"};
  ctx.kind = PromptKind::Init;
  const auto init = build_prompt(ctx);
  EXPECT_NE(init.find("tomato soil"), std::string::npos);
  EXPECT_NE(init.find("147"), std::string::npos);
  EXPECT_EQ(init.find('{'), std::string::npos);

  ctx.kind = PromptKind::NoFeedback;
  ctx.current_document = "Loam drains well.";
  const auto nf = build_prompt(ctx);
  EXPECT_NE(nf.find("Loam drains well."), std::string::npos);
  EXPECT_TRUE(nf.ends_with("Edited Document: "));

  ctx.kind = PromptKind::Init;
  ctx.history = three_round_context(PromptKind::Lsw).history;
  EXPECT_THROW(build_prompt(ctx), ValidationError);
}

TEST(BuildPrompt, RejectsInconsistentLimits) {
  auto ctx = three_round_context(PromptKind::Lsw);
  ctx.word_target = 200;
  EXPECT_THROW(build_prompt(ctx), ValidationError);
}

TEST(Templates, RenderRejectsUnknownPlaceholders) {
  EXPECT_EQ(render_template("a {x} b", {{"x", "1"}}), "a 1 b");
  EXPECT_EQ(render_template("{x}{x}", {{"x", "{y}"}}), "{y}{y}");
  EXPECT_THROW(render_template("{nope}", {}), ValidationError);
  EXPECT_FALSE(PromptTemplates::builtin().version.empty());
}

TEST(Postprocess, StripsFencesLabelsAndQuotes) {
  EXPECT_EQ(postprocess_completion("Edited Document: \"Better text.\""), "Better text.");
  EXPECT_EQ(postprocess_completion("```\nSome text\n```"), "Some text");
  EXPECT_EQ(postprocess_completion("EDITED DOCUMENT:\nLine one\nLine two\n"), "Line one\nLine two");
  EXPECT_EQ(postprocess_completion("\xE2\x80\x9C" "Curly" "\xE2\x80\x9D"), "Curly");
  EXPECT_EQ(postprocess_completion("   "), "");
}

TEST(WordLimit, TruncatesAtWordMax) {
  const auto w = enforce_word_limit("one two three four", 3);
  EXPECT_EQ(w.text, "one two three");
  EXPECT_TRUE(w.truncated);
  const auto k = enforce_word_limit("one two", 3);
  EXPECT_EQ(k.text, "one two");
  EXPECT_FALSE(k.truncated);
}

TEST(LlmAgent, PostprocessesAndLimits) {
  auto ctx = three_round_context(PromptKind::Lsw);
  ctx.word_max = 4;
  ctx.word_target = 3;
  ChatRequest seen;
  FunctionChatProvider chat([&](const ChatRequest& r) {
    seen = r;
    return std::string("Edited Document: a b c d e f");
  });
  const auto a = llm_agent_act(ctx, chat, "model-x", 0.5, 9);
  EXPECT_EQ(a.text, "a b c d");
  EXPECT_TRUE(a.truncated);
  EXPECT_EQ(a.round, 3);
  EXPECT_EQ(seen.model, "model-x");
  EXPECT_EQ(seen.sample_index, 9u);
  EXPECT_EQ(seen.prompt, a.prompt);
}

TEST(LlmAgent, EmptyCompletionKeepsPreviousDocument) {
  auto ctx = three_round_context(PromptKind::Lsw);
  FunctionChatProvider chat([](const ChatRequest&) { return std::string("```\n```"); });
  const auto a = llm_agent_act(ctx, chat, "m", 0.0, 0);
  EXPECT_EQ(a.text, "My round two.");
  EXPECT_TRUE(a.kept_previous);

  PromptContext init;
  init.query = Query{"q", "x"};
  init.kind = PromptKind::Init;
  EXPECT_THROW(llm_agent_act(init, chat, "m", 0.0, 0), ProviderError);
}

TEST(Scripted, Strategies) {
  auto ctx = three_round_context(PromptKind::Lsw);
  EXPECT_EQ(scripted_agent_act(ctx, Strategy::Noop).text, "My round two.");
  ctx.own_agent_id = "x";
  EXPECT_EQ(scripted_agent_act(ctx, Strategy::CopyTop).text, "My round two.");

  ctx.own_agent_id = "me";
  ctx.word_max = 8;
  ctx.word_target = 8;
  EXPECT_EQ(scripted_agent_act(ctx, Strategy::KeywordStuff).text,
            "My round two. electric car battery electric car");

  ctx.own_agent_id = "x";  // winner "me": "My round two." ; own: "X round two."
  EXPECT_EQ(scripted_agent_act(ctx, Strategy::MimicWinnerPrefix).text, "My round two.");

  PromptContext none;
  none.query = Query{"q", "a"};
  none.own_agent_id = "z";
  none.current_document = "hello";
  EXPECT_THROW(scripted_agent_act(none, Strategy::CopyTop), ValidationError);
  EXPECT_EQ(scripted_agent_act(none, Strategy::MimicWinnerPrefix).text, "hello");
}

TEST(Strategy, StringRoundTrip) {
  for (auto s : {Strategy::Noop, Strategy::CopyTop, Strategy::KeywordStuff,
                 Strategy::MimicWinnerPrefix}) {
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  for (auto k : {PromptKind::Lsw, PromptKind::Paw, PromptKind::NoFeedback, PromptKind::Init}) {
    EXPECT_EQ(prompt_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(feedback_depth(PromptKind::Lsw), 2);
  EXPECT_EQ(feedback_depth(PromptKind::Paw), 3);
}

}  // namespace
}  // namespace rankarena
