// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankarena/agents.hpp"
#include "rankarena/corpus.hpp"
#include "rankarena/ranking.hpp"
#include "rankarena/templates.hpp"

namespace rankarena {

class ChatProvider;

enum class AgentKind { Llm, Scripted };

struct AgentSpec {
  std::string id;
  AgentKind kind = AgentKind::Scripted;
  std::string model;         // llm only
  std::string endpoint;      // llm only; empty selects the default chat endpoint
  double temperature = 0.0;  // llm only
  Strategy strategy = Strategy::Noop;  // scripted only
};

struct RankerSpec {
  enum class Kind { Bm25, Dense, TermFrequency, Constant };
  Kind kind = Kind::Bm25;
  Bm25Params bm25;
  /// BM25 statistics corpus (JSON Lines, `text`); empty uses the topics'
  /// seed documents.
  std::string corpus_path;
  std::string embed_model;  // dense only
  double constant = 0.0;    // constant only
};

std::string_view to_string(RankerSpec::Kind kind);
RankerSpec::Kind ranker_kind_from_string(std::string_view name);

struct CompetitionConfig {
  std::vector<AgentSpec> roster;
  RankerSpec ranker;
  int rounds = 30;
  PromptKind prompt_kind = PromptKind::Lsw;
  TiePolicy tie_policy = TiePolicy::Deterministic;
  std::uint64_t seed = 0;
  int word_max = 150;
  int word_target = 147;
  /// A game aborts once any agent fails this many rounds in a row.
  int max_consecutive_failures = 3;

  /// Throws ValidationError on T < 1, fewer than two agents, duplicate ids or
  /// inconsistent word limits.
  void validate() const;
  const AgentSpec& agent(std::string_view id) const;
};

nlohmann::json to_json(const AgentSpec& spec);
nlohmann::json to_json(const RankerSpec& spec);
nlohmann::json to_json(const CompetitionConfig& config);
AgentSpec agent_spec_from_json(const nlohmann::json& j);
RankerSpec ranker_spec_from_json(const nlohmann::json& j);
CompetitionConfig competition_config_from_json(const nlohmann::json& j);

/// Stable short hash over the canonical config JSON plus `salt` (callers
/// pass e.g. the topic set digest).
std::string config_fingerprint(const CompetitionConfig& config, std::string_view salt = {});

struct Document {
  std::string agent_id;
  int round = 0;
  std::string text;
  std::size_t word_count = 0;
  std::string prompt;
  bool truncated = false;
  bool kept_previous = false;
  bool failed = false;  // provider failure this round; previous text kept
  friend bool operator==(const Document&, const Document&) = default;
};

struct RoundState {
  int round = 0;
  std::map<std::string, Document> documents;  // agent id -> document
  Ranking ranking;
  friend bool operator==(const RoundState&, const RoundState&) = default;
};

enum class GameStatus { Complete, Aborted };
std::string_view to_string(GameStatus status);

struct GameLog {
  Query query;
  SeedDocument seed_doc;
  /// Round 0: every agent holds the seed document, ranked once so round-1
  /// prompts have a ranking to show.
  RoundState initial;
  /// Rounds 1..T (fewer if aborted).
  std::vector<RoundState> rounds;
  std::string fingerprint;
  GameStatus status = GameStatus::Complete;
  std::string error;

  /// Round 0 followed by the played rounds, as agents see them.
  std::vector<HistoryRound> history() const;
  /// Round state for round `t` in [0, T]; throws ValidationError otherwise.
  const RoundState& at_round(int t) const;
};

struct CompetitionLog {
  std::string fingerprint;
  nlohmann::json config;
  std::vector<GameLog> games;
  std::vector<std::string> agent_ids() const;
};

/// What a game needs beyond its config: the ranker and chat endpoints.
struct GameServices {
  std::shared_ptr<const Scorer> scorer;
  /// Chat provider for an LLM agent; may return the same instance for all.
  std::function<std::shared_ptr<ChatProvider>(const AgentSpec&)> chat_for;
  const PromptTemplates* templates = &PromptTemplates::builtin();
  /// Stop after this round even if config.rounds is larger (0 = no limit).
  int stop_after_round = 0;
};

/// Per-(query, round) tie-break seed; independent of roster order.
std::uint64_t round_seed(std::uint64_t base_seed, std::string_view query_id, int round);

/// Sample index an LLM agent uses for its round-`round` request. Distinct
/// per agent so clones sharing a prompt draw distinct samples.
std::uint64_t agent_sample_index(std::string_view agent_id, int round);

/// Plays one game. Provider failures keep the agent's previous document for
/// that round; after max_consecutive_failures in a row for one agent, or on
/// any hard error (e.g. a cache miss with the network disabled), the game
/// stops with status Aborted and the rounds completed so far.
GameLog run_game(const CompetitionConfig& config, const Topic& topic,
                 const GameServices& services, std::string fingerprint = {});

/// One game per topic, `jobs` games at a time. Aborted games are recorded and
/// do not stop the others.
CompetitionLog run_competition(const CompetitionConfig& config, std::span<const Topic> topics,
                               const GameServices& services, int jobs = 1,
                               std::string fingerprint = {});

}  // namespace rankarena
