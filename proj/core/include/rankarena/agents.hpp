// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankarena/corpus.hpp"
#include "rankarena/ranking.hpp"
#include "rankarena/templates.hpp"

namespace rankarena {

class ChatProvider;

enum class PromptKind {
  Lsw,         // listwise: full ranked lists of the last two rounds
  Paw,         // pairwise: one document pair over the last three rounds
  NoFeedback,  // edit the current document without ranking feedback
  Init,        // write an initial document for the query
};

std::string_view to_string(PromptKind kind);
PromptKind prompt_kind_from_string(std::string_view name);

/// Rounds of feedback the prompt kind shows when available.
int feedback_depth(PromptKind kind);

/// Everything visible after one round: each agent's document and the ranking.
struct HistoryRound {
  int round = 0;
  std::map<std::string, std::string> documents;  // agent id -> text
  Ranking ranking;
};

struct PromptContext {
  Query query;
  std::string own_agent_id;
  std::vector<HistoryRound> history;  // ascending by round
  PromptKind kind = PromptKind::Lsw;
  /// Overrides the agent's latest document from history (required for
  /// NoFeedback when there is no history).
  std::optional<std::string> current_document;
  int word_target = 147;
  int word_max = 150;

  /// Round the agent is acting in: one past the latest history round.
  int acting_round() const;
  /// The agent's current document; throws ValidationError if unknown.
  std::string own_document() const;
};

struct AgentAction {
  std::string agent_id;
  int round = 0;
  std::string text;
  bool truncated = false;      // trimmed to word_max
  bool kept_previous = false;  // empty completion, previous document retained
  std::string prompt;          // prompt shown to the agent, empty if none
};

/// Renders the prompt for `ctx`. Competitor documents appear only under rank
/// labels, never with agent ids. LSW/PAW with fewer past rounds than their
/// depth render what exists and say how many rounds are shown.
std::string build_prompt(const PromptContext& ctx, const PromptTemplates& templates);
std::string build_prompt(const PromptContext& ctx);

/// Strips markdown fences, echoed "Edited Document:" style labels and
/// surrounding quotes from a raw completion.
std::string postprocess_completion(std::string_view raw);

struct WordLimited {
  std::string text;
  bool truncated = false;
};

/// Cuts `text` after its `word_max`-th word, preserving the original spacing
/// of the kept prefix.
WordLimited enforce_word_limit(std::string_view text, int word_max);

/// One LLM agent move: prompt, complete, post-process, enforce the word limit.
/// An empty completion keeps the previous document (flagged); provider
/// failures propagate as ProviderError.
AgentAction llm_agent_act(const PromptContext& ctx, ChatProvider& chat, const std::string& model,
                          double temperature, std::uint64_t sample_index,
                          const PromptTemplates& templates = PromptTemplates::builtin());

enum class Strategy {
  Noop,               // resubmit own document
  CopyTop,            // copy last round's rank-1 document
  KeywordStuff,       // append query words up to the word limit
  MimicWinnerPrefix,  // winner's first half + own second half
};

std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view name);

/// Rule-based agents used as test oracles and cheap baselines.
AgentAction scripted_agent_act(const PromptContext& ctx, Strategy strategy);

}  // namespace rankarena
