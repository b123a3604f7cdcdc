// SPDX-License-Identifier: Apache-2.0
#include "rankarena/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "rankarena/agents.hpp"
#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/log.hpp"

namespace rankarena {
namespace fs = std::filesystem;

namespace {

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::clamp(jobs, 1, 64)), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

bool all_identical(const std::vector<std::string>& texts) {
  return std::adjacent_find(texts.begin(), texts.end(), std::not_equal_to<>()) == texts.end();
}

void write_lines(const fs::path& path, const std::vector<const PreferenceTriplet*>& rows) {
  std::string body;
  for (const auto* t : rows) body += to_json(*t).dump() + "\n";
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << body;
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string_view to_string(TripletSource source) { return source == TripletSource::Sg ? "SG" : "DG"; }

TripletSource triplet_source_from_string(std::string_view name) {
  if (name == "SG" || name == "sg") return TripletSource::Sg;
  if (name == "DG" || name == "dg") return TripletSource::Dg;
  throw ParseError("unknown triplet source '" + std::string(name) + "'");
}

nlohmann::json to_json(const PreferenceTriplet& t) {
  nlohmann::json meta{{"query_id", t.meta.query_id},
                      {"query", t.meta.query},
                      {"source", std::string(to_string(t.meta.source))},
                      {"ranker", t.meta.ranker},
                      {"generator_model", t.meta.generator_model},
                      {"temperature", t.meta.temperature},
                      {"chosen_score", t.meta.chosen_score},
                      {"rejected_score", t.meta.rejected_score}};
  if (t.meta.source == TripletSource::Dg) {
    meta["round"] = t.meta.round;
  } else {
    meta["sample_count"] = t.meta.sample_count;
  }
  return {{"prompt", t.prompt}, {"chosen", t.chosen}, {"rejected", t.rejected}, {"meta", meta}};
}

PreferenceTriplet triplet_from_json(const nlohmann::json& j) {
  PreferenceTriplet t;
  t.prompt = j.at("prompt").get<std::string>();
  t.chosen = j.at("chosen").get<std::string>();
  t.rejected = j.at("rejected").get<std::string>();
  const auto& m = j.at("meta");
  t.meta.query_id = m.at("query_id").get<std::string>();
  t.meta.query = m.value("query", std::string{});
  t.meta.source = triplet_source_from_string(m.at("source").get<std::string>());
  t.meta.round = m.value("round", 0);
  t.meta.sample_count = m.value("sample_count", 0);
  t.meta.ranker = m.value("ranker", std::string{});
  t.meta.generator_model = m.value("generator_model", std::string{});
  t.meta.temperature = m.value("temperature", 0.0);
  t.meta.chosen_score = m.value("chosen_score", 0.0);
  t.meta.rejected_score = m.value("rejected_score", 0.0);
  return t;
}

void validate_triplet(const PreferenceTriplet& t) {
  if (t.prompt.empty()) throw ValidationError("triplet has an empty prompt");
  if (t.chosen == t.rejected) throw ValidationError("triplet chosen and rejected are identical");
  if (t.meta.query_id.empty()) throw ValidationError("triplet has no query id");
  if (t.meta.chosen_score < t.meta.rejected_score) {
    throw ValidationError("triplet chosen score is below rejected score");
  }
}

void verify_rescoring(std::span<const PreferenceTriplet> triplets, const Scorer& scorer) {
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    const Query q{t.meta.query_id, t.meta.query};
    const double c = scorer.score(q, t.chosen);
    const double r = scorer.score(q, t.rejected);
    if (c < r) {
      throw ValidationError("triplet " + std::to_string(i) + " (query '" + t.meta.query_id +
                            "'): chosen scores " + std::to_string(c) + " < rejected " +
                            std::to_string(r));
    }
  }
}

SgResult generate_sg(std::span<const Topic> topics, ChatProvider& chat, const Scorer& scorer,
                     const SgOptions& options, const PromptTemplates& templates) {
  if (options.samples < 2) {
    throw ValidationError("SG needs at least 2 samples per query, got " +
                          std::to_string(options.samples));
  }
  if (options.temperature < 0.0) throw ValidationError("SG temperature must be non-negative");

  std::vector<std::optional<PreferenceTriplet>> slots(topics.size());
  parallel_for(topics.size(), options.jobs, [&](std::size_t qi) {
    const auto& topic = topics[qi];
    PromptContext ctx;
    ctx.query = topic.query;
    ctx.own_agent_id = "generator";
    ctx.word_target = options.word_target;
    ctx.word_max = options.word_max;

    std::string initial = topic.seed.text;
    if (options.generate_initial) {
      ctx.kind = PromptKind::Init;
      initial = llm_agent_act(ctx, chat, options.model, options.initial_temperature, 0, templates)
                    .text;
    }
    ctx.kind = PromptKind::NoFeedback;
    ctx.current_document = initial;

    std::vector<Candidate> candidates;
    std::vector<std::string> texts;
    std::string prompt;
    for (int i = 0; i < options.samples; ++i) {
      auto action = llm_agent_act(ctx, chat, options.model, options.temperature,
                                  static_cast<std::uint64_t>(i), templates);
      prompt = action.prompt;
      texts.push_back(action.text);
      candidates.push_back(Candidate{"sample-" + std::to_string(i),
                                     topic.query.id + "/sg/" + std::to_string(i), action.text});
    }
    if (all_identical(texts)) return;
    const auto ranking = rank(topic.query, candidates, scorer, options.tie_policy,
                              derive_seed(options.seed, topic.query.id));
    const auto& top = ranking.top();
    const auto& bottom = ranking.bottom();
    auto text_of = [&](const ScoredDoc& d) -> const std::string& {
      for (const auto& c : candidates) {
        if (c.agent_id == d.agent_id) return c.text;
      }
      throw ValidationError("ranked sample missing from candidates");
    };
    if (text_of(top) == text_of(bottom)) return;

    PreferenceTriplet t;
    t.prompt = prompt;
    t.chosen = text_of(top);
    t.rejected = text_of(bottom);
    t.meta.query_id = topic.query.id;
    t.meta.query = topic.query.text;
    t.meta.source = TripletSource::Sg;
    t.meta.sample_count = options.samples;
    t.meta.ranker = scorer.describe();
    t.meta.generator_model = options.model;
    t.meta.temperature = options.temperature;
    t.meta.chosen_score = top.score;
    t.meta.rejected_score = bottom.score;
    slots[qi] = std::move(t);
  });

  SgResult result;
  for (auto& s : slots) {
    if (s) {
      result.triplets.push_back(std::move(*s));
    } else {
      ++result.stats.skipped;
    }
  }
  result.stats.emitted = result.triplets.size();
  return result;
}

std::vector<int> default_round_select(PromptKind kind) {
  switch (kind) {
    case PromptKind::Lsw: return {3};
    case PromptKind::Paw: return {4};
    default: return {1};
  }
}

DgResult generate_dg(std::span<const Topic> topics, const CompetitionConfig& config,
                     const GameServices& services, const DgOptions& options) {
  config.validate();
  auto rounds = options.round_select.empty() ? default_round_select(config.prompt_kind)
                                             : options.round_select;
  std::sort(rounds.begin(), rounds.end());
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  for (int r : rounds) {
    if (r < 1 || r > config.rounds) {
      throw ValidationError("selected round " + std::to_string(r) + " is outside [1, " +
                            std::to_string(config.rounds) + "]");
    }
  }
  if (!options.focal_agent.empty()) config.agent(options.focal_agent);

  GameServices limited = services;
  limited.stop_after_round = rounds.back();

  DgResult result;
  result.log = run_competition(config, topics, limited, options.jobs);
  const auto ranker = services.scorer->describe();
  for (const auto& game : result.log.games) {
    for (int r : rounds) {
      if (r > static_cast<int>(game.rounds.size())) {
        ++result.stats.aborted;
        continue;
      }
      const auto& state = game.at_round(r);
      std::vector<std::string> texts;
      for (const auto& [agent, d] : state.documents) texts.push_back(d.text);
      const auto& top = state.ranking.top();
      const auto& bottom = state.ranking.bottom();
      const auto& chosen = state.documents.at(top.agent_id);
      const auto& rejected = state.documents.at(bottom.agent_id);
      if (all_identical(texts) || chosen.text == rejected.text) {
        ++result.stats.skipped;
        continue;
      }
      const auto focal = options.focal_agent.empty() ? top.agent_id : options.focal_agent;
      const auto& focal_spec = config.agent(focal);

      PreferenceTriplet t;
      t.prompt = state.documents.at(focal).prompt;
      t.chosen = chosen.text;
      t.rejected = rejected.text;
      t.meta.query_id = game.query.id;
      t.meta.query = game.query.text;
      t.meta.source = TripletSource::Dg;
      t.meta.round = r;
      t.meta.ranker = ranker;
      t.meta.generator_model =
          focal_spec.kind == AgentKind::Llm ? focal_spec.model
                                            : "scripted:" + std::string(to_string(focal_spec.strategy));
      t.meta.temperature = focal_spec.temperature;
      t.meta.chosen_score = top.score;
      t.meta.rejected_score = bottom.score;
      result.triplets.push_back(std::move(t));
    }
  }
  result.stats.emitted = result.triplets.size();
  return result;
}

QuerySplit split_queries(std::vector<std::string> query_ids, std::uint64_t seed) {
  std::sort(query_ids.begin(), query_ids.end());
  query_ids.erase(std::unique(query_ids.begin(), query_ids.end()), query_ids.end());
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(query_ids.begin(), query_ids.end());
  const auto n_test = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(query_ids.size())));
  QuerySplit split;
  split.test.assign(query_ids.begin(), query_ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(query_ids.begin() + static_cast<std::ptrdiff_t>(n_test), query_ids.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

nlohmann::json advisory_hyperparameters() {
  return {{"batch_size", 2},
          {"gradient_accumulation_steps", 4},
          {"epochs", 4},
          {"learning_rate", 1e-6},
          {"trainable_layers", 20},
          {"loss", "wpo"},
          {"beta", 0.1},
          {"optimizer", {{"name", "adam"}, {"beta1", 0.9}, {"beta2", 0.99}, {"weight_decay", 0.01}}}};
}

nlohmann::json to_json(const DatasetManifest& m) {
  return {{"triplet_count", m.triplet_count},
          {"train_count", m.train_count},
          {"test_count", m.test_count},
          {"duplicates_removed", m.duplicates_removed},
          {"skipped", m.skipped},
          {"split", {{"train", m.split.train}, {"test", m.split.test}}},
          {"fingerprint", m.fingerprint},
          {"seed", m.seed},
          {"generation", m.generation},
          {"advisory_hyperparameters", advisory_hyperparameters()},
          {"files", {{"train", "train.jsonl"}, {"test", "test.jsonl"}}}};
}

DatasetManifest write_dataset(std::span<const PreferenceTriplet> triplets, const fs::path& dir,
                              std::uint64_t seed, std::string fingerprint, std::size_t skipped,
                              nlohmann::json generation) {
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    try {
      validate_triplet(triplets[i]);
    } catch (const ValidationError& e) {
      throw ValidationError("triplet " + std::to_string(i) + ": " + e.what());
    }
  }

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.fingerprint = std::move(fingerprint);
  manifest.skipped = skipped;
  manifest.generation = std::move(generation);

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::vector<const PreferenceTriplet*> unique;
  std::vector<std::string> ids;
  for (const auto& t : triplets) {
    if (!seen.emplace(t.prompt, t.chosen, t.rejected).second) {
      ++manifest.duplicates_removed;
      continue;
    }
    unique.push_back(&t);
    ids.push_back(t.meta.query_id);
  }
  manifest.split = split_queries(ids, seed);
  const std::set<std::string> test_ids(manifest.split.test.begin(), manifest.split.test.end());

  std::vector<const PreferenceTriplet*> train, test;
  for (const auto* t : unique) (test_ids.contains(t->meta.query_id) ? test : train).push_back(t);
  manifest.triplet_count = unique.size();
  manifest.train_count = train.size();
  manifest.test_count = test.size();

  fs::create_directories(dir);
  write_lines(dir / "train.jsonl", train);
  write_lines(dir / "test.jsonl", test);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << to_json(manifest).dump(2) << "\n";
  if (manifest.duplicates_removed > 0) {
    log::info("dataset: removed " + std::to_string(manifest.duplicates_removed) + " duplicate row(s)");
  }
  return manifest;
}

std::vector<PreferenceTriplet> read_triplets(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<PreferenceTriplet> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(triplet_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace rankarena
