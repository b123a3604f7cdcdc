// SPDX-License-Identifier: Apache-2.0
#include "rankarena/game.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/log.hpp"
#include "rankarena/providers.hpp"

namespace rankarena {
namespace {

std::string doc_id(const std::string& query_id, int round, const std::string& agent_id) {
  return query_id + "/" + std::to_string(round) + "/" + agent_id;
}

Document make_document(const AgentAction& action) {
  Document d;
  d.agent_id = action.agent_id;
  d.round = action.round;
  d.text = action.text;
  d.word_count = word_count(action.text);
  d.prompt = action.prompt;
  d.truncated = action.truncated;
  d.kept_previous = action.kept_previous;
  return d;
}

Ranking rank_round(const CompetitionConfig& config, const Query& query, int round,
                   const std::map<std::string, Document>& documents, const Scorer& scorer) {
  std::vector<Candidate> candidates;
  candidates.reserve(documents.size());
  for (const auto& [agent, doc] : documents) {
    candidates.push_back(Candidate{agent, doc_id(query.id, round, agent), doc.text});
  }
  return rank(query, candidates, scorer, config.tie_policy,
              round_seed(config.seed, query.id, round), round);
}

}  // namespace

std::string_view to_string(RankerSpec::Kind kind) {
  switch (kind) {
    case RankerSpec::Kind::Bm25: return "bm25";
    case RankerSpec::Kind::Dense: return "dense";
    case RankerSpec::Kind::TermFrequency: return "term_frequency";
    case RankerSpec::Kind::Constant: return "constant";
  }
  return "unknown";
}

RankerSpec::Kind ranker_kind_from_string(std::string_view name) {
  if (name == "bm25") return RankerSpec::Kind::Bm25;
  if (name == "dense") return RankerSpec::Kind::Dense;
  if (name == "term_frequency") return RankerSpec::Kind::TermFrequency;
  if (name == "constant") return RankerSpec::Kind::Constant;
  throw ConfigError("unknown ranker kind '" + std::string(name) +
                    "' (expected bm25, dense, term_frequency or constant)");
}

std::string_view to_string(GameStatus status) {
  return status == GameStatus::Complete ? "complete" : "aborted";
}

void CompetitionConfig::validate() const {
  if (rounds < 1) throw ValidationError("rounds must be at least 1");
  if (roster.size() < 2) throw ValidationError("a competition needs at least two agents");
  std::set<std::string> ids;
  for (const auto& a : roster) {
    if (a.id.empty()) throw ValidationError("agent id must be non-empty");
    if (!ids.insert(a.id).second) throw ValidationError("duplicate agent id '" + a.id + "'");
    if (a.kind == AgentKind::Llm && a.model.empty()) {
      throw ValidationError("LLM agent '" + a.id + "' has no model");
    }
    if (a.temperature < 0.0) {
      throw ValidationError("agent '" + a.id + "' has a negative temperature");
    }
  }
  if (word_max < 1 || word_target < 1 || word_target > word_max) {
    throw ValidationError("word limits must satisfy 1 <= word_target <= word_max");
  }
  if (prompt_kind == PromptKind::Init) {
    throw ValidationError("prompt_kind 'init' only writes initial documents; use lsw, paw or nofeedback");
  }
  if (max_consecutive_failures < 1) {
    throw ValidationError("max_consecutive_failures must be at least 1");
  }
}

const AgentSpec& CompetitionConfig::agent(std::string_view id) const {
  for (const auto& a : roster) {
    if (a.id == id) return a;
  }
  throw ValidationError("unknown agent '" + std::string(id) + "'");
}

nlohmann::json to_json(const AgentSpec& spec) {
  nlohmann::json j{{"id", spec.id}};
  if (spec.kind == AgentKind::Llm) {
    j["kind"] = "llm";
    j["model"] = spec.model;
    j["endpoint"] = spec.endpoint;
    j["temperature"] = spec.temperature;
  } else {
    j["kind"] = "scripted";
    j["strategy"] = std::string(to_string(spec.strategy));
  }
  return j;
}

nlohmann::json to_json(const RankerSpec& spec) {
  nlohmann::json j{{"kind", std::string(to_string(spec.kind))}};
  switch (spec.kind) {
    case RankerSpec::Kind::Bm25:
      j["k1"] = spec.bm25.k1;
      j["b"] = spec.bm25.b;
      j["corpus"] = spec.corpus_path;
      break;
    case RankerSpec::Kind::Dense:
      j["embed_model"] = spec.embed_model;
      break;
    case RankerSpec::Kind::Constant:
      j["value"] = spec.constant;
      break;
    case RankerSpec::Kind::TermFrequency:
      break;
  }
  return j;
}

nlohmann::json to_json(const CompetitionConfig& config) {
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& a : config.roster) roster.push_back(to_json(a));
  return {
      {"roster", roster},
      {"ranker", to_json(config.ranker)},
      {"rounds", config.rounds},
      {"prompt_kind", std::string(to_string(config.prompt_kind))},
      {"tie_policy", std::string(to_string(config.tie_policy))},
      {"seed", config.seed},
      {"word_max", config.word_max},
      {"word_target", config.word_target},
      {"max_consecutive_failures", config.max_consecutive_failures},
  };
}

AgentSpec agent_spec_from_json(const nlohmann::json& j) {
  AgentSpec a;
  a.id = j.at("id").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "llm") {
    a.kind = AgentKind::Llm;
    a.model = j.at("model").get<std::string>();
    a.endpoint = j.value("endpoint", std::string{});
    a.temperature = j.value("temperature", 0.0);
  } else if (kind == "scripted") {
    a.kind = AgentKind::Scripted;
    a.strategy = strategy_from_string(j.value("strategy", std::string("noop")));
  } else {
    throw ConfigError("unknown agent kind '" + kind + "'");
  }
  return a;
}

RankerSpec ranker_spec_from_json(const nlohmann::json& j) {
  RankerSpec r;
  r.kind = ranker_kind_from_string(j.at("kind").get<std::string>());
  r.bm25.k1 = j.value("k1", r.bm25.k1);
  r.bm25.b = j.value("b", r.bm25.b);
  r.corpus_path = j.value("corpus", std::string{});
  r.embed_model = j.value("embed_model", std::string{});
  r.constant = j.value("value", 0.0);
  return r;
}

CompetitionConfig competition_config_from_json(const nlohmann::json& j) {
  CompetitionConfig c;
  for (const auto& a : j.at("roster")) c.roster.push_back(agent_spec_from_json(a));
  c.ranker = ranker_spec_from_json(j.at("ranker"));
  c.rounds = j.at("rounds").get<int>();
  c.prompt_kind = prompt_kind_from_string(j.at("prompt_kind").get<std::string>());
  c.tie_policy = tie_policy_from_string(j.at("tie_policy").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.word_max = j.at("word_max").get<int>();
  c.word_target = j.at("word_target").get<int>();
  c.max_consecutive_failures = j.value("max_consecutive_failures", 3);
  return c;
}

std::string config_fingerprint(const CompetitionConfig& config, std::string_view salt) {
  std::string material = canonicalize(to_json(config));
  material += '\n';
  material += salt;
  return sha256_hex(material).substr(0, 16);
}

std::vector<HistoryRound> GameLog::history() const {
  std::vector<HistoryRound> out;
  out.reserve(rounds.size() + 1);
  auto add = [&out](const RoundState& s) {
    HistoryRound h;
    h.round = s.round;
    for (const auto& [agent, doc] : s.documents) h.documents.emplace(agent, doc.text);
    h.ranking = s.ranking;
    out.push_back(std::move(h));
  };
  add(initial);
  for (const auto& r : rounds) add(r);
  return out;
}

const RoundState& GameLog::at_round(int t) const {
  if (t == 0) return initial;
  if (t < 0 || t > static_cast<int>(rounds.size())) {
    throw ValidationError("game '" + query.id + "' has no round " + std::to_string(t));
  }
  return rounds[static_cast<std::size_t>(t - 1)];
}

std::vector<std::string> CompetitionLog::agent_ids() const {
  std::set<std::string> ids;
  for (const auto& g : games) {
    for (const auto& [agent, doc] : g.initial.documents) ids.insert(agent);
  }
  return {ids.begin(), ids.end()};
}

std::uint64_t round_seed(std::uint64_t base_seed, std::string_view query_id, int round) {
  return derive_seed(derive_seed(base_seed, query_id), static_cast<std::uint64_t>(round));
}

std::uint64_t agent_sample_index(std::string_view agent_id, int round) {
  // Kept below 2^53 so the index survives JSON round trips through any consumer.
  return derive_seed(fnv1a64(agent_id), static_cast<std::uint64_t>(round)) >> 11;
}

GameLog run_game(const CompetitionConfig& config, const Topic& topic,
                 const GameServices& services, std::string fingerprint) {
  config.validate();
  if (!services.scorer) throw ValidationError("run_game: no scorer configured");

  GameLog log;
  log.query = topic.query;
  log.seed_doc = topic.seed;
  log.fingerprint = std::move(fingerprint);

  log.initial.round = 0;
  for (const auto& a : config.roster) {
    Document d;
    d.agent_id = a.id;
    d.round = 0;
    d.text = topic.seed.text;
    d.word_count = word_count(d.text);
    log.initial.documents.emplace(a.id, std::move(d));
  }

  std::map<std::string, std::shared_ptr<ChatProvider>> chats;
  std::map<std::string, int> consecutive_failures;
  for (const auto& a : config.roster) {
    consecutive_failures[a.id] = 0;
    if (a.kind == AgentKind::Llm) {
      if (!services.chat_for) throw ValidationError("LLM agent '" + a.id + "' needs a chat provider");
      chats[a.id] = services.chat_for(a);
      if (!chats[a.id]) throw ValidationError("no chat provider for agent '" + a.id + "'");
    }
  }

  try {
    log.initial.ranking =
        rank_round(config, topic.query, 0, log.initial.documents, *services.scorer);

    const int last_round = services.stop_after_round > 0
                               ? std::min(config.rounds, services.stop_after_round)
                               : config.rounds;
    auto history = log.history();
    for (int t = 1; t <= last_round; ++t) {
      RoundState state;
      state.round = t;
      // Every action is computed from history through t-1 before any is
      // recorded, so agents never see same-round moves.
      for (const auto& a : config.roster) {
        PromptContext ctx;
        ctx.query = topic.query;
        ctx.own_agent_id = a.id;
        ctx.history = history;
        ctx.kind = config.prompt_kind;
        ctx.word_target = config.word_target;
        ctx.word_max = config.word_max;

        Document doc;
        if (a.kind == AgentKind::Scripted) {
          auto action = scripted_agent_act(ctx, a.strategy);
          action.prompt = build_prompt(ctx, *services.templates);
          doc = make_document(action);
        } else {
          try {
            doc = make_document(llm_agent_act(ctx, *chats.at(a.id), a.model, a.temperature,
                                              agent_sample_index(a.id, t),
                                              *services.templates));
            consecutive_failures[a.id] = 0;
          } catch (const CacheMissError&) {
            throw;
          } catch (const ProviderError& e) {
            const int failures = ++consecutive_failures[a.id];
            log::warn("query '" + topic.query.id + "' round " + std::to_string(t) + " agent '" +
                      a.id + "': " + e.what());
            if (failures >= config.max_consecutive_failures) {
              throw ProviderError("agent '" + a.id + "' failed " + std::to_string(failures) +
                                  " consecutive rounds; last error: " + e.what());
            }
            doc.agent_id = a.id;
            doc.round = t;
            doc.text = ctx.own_document();
            doc.word_count = word_count(doc.text);
            doc.prompt = build_prompt(ctx, *services.templates);
            doc.failed = true;
          }
        }
        state.documents.emplace(a.id, std::move(doc));
      }
      state.ranking = rank_round(config, topic.query, t, state.documents, *services.scorer);
      log.rounds.push_back(std::move(state));
      history = log.history();
    }
  } catch (const Error& e) {
    log.status = GameStatus::Aborted;
    log.error = e.what();
    log::error("game '" + topic.query.id + "' aborted after " +
               std::to_string(log.rounds.size()) + " round(s): " + e.what());
  }
  return log;
}

CompetitionLog run_competition(const CompetitionConfig& config, std::span<const Topic> topics,
                               const GameServices& services, int jobs, std::string fingerprint) {
  if (topics.empty()) throw ValidationError("run_competition: empty topic list");
  config.validate();

  CompetitionLog out;
  out.fingerprint = fingerprint;
  out.config = to_json(config);
  out.games.resize(topics.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < topics.size(); i = next.fetch_add(1)) {
      out.games[i] = run_game(config, topics[i], services, fingerprint);
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  if (workers == 1 || topics.size() == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, topics.size()); ++w) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace rankarena
