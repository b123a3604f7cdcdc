// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankarena/corpus.hpp"
#include "rankarena/game.hpp"
#include "rankarena/ranking.hpp"
#include "rankarena/templates.hpp"

namespace rankarena {

class ChatProvider;

enum class TripletSource { Sg, Dg };
std::string_view to_string(TripletSource source);
TripletSource triplet_source_from_string(std::string_view name);

struct TripletMeta {
  std::string query_id;
  std::string query;
  TripletSource source = TripletSource::Sg;
  int round = 0;         // DG: selected round
  int sample_count = 0;  // SG: N
  std::string ranker;
  std::string generator_model;
  double temperature = 0.0;
  double chosen_score = 0.0;
  double rejected_score = 0.0;
  friend bool operator==(const TripletMeta&, const TripletMeta&) = default;
};

struct PreferenceTriplet {
  std::string prompt;
  std::string chosen;
  std::string rejected;
  TripletMeta meta;
  friend bool operator==(const PreferenceTriplet&, const PreferenceTriplet&) = default;
};

nlohmann::json to_json(const PreferenceTriplet& t);
PreferenceTriplet triplet_from_json(const nlohmann::json& j);

/// Throws ValidationError if chosen == rejected, the prompt is empty, or the
/// recorded chosen score is below the rejected score.
void validate_triplet(const PreferenceTriplet& t);

/// Re-scores chosen and rejected with `scorer`; throws ValidationError naming
/// the first triplet whose chosen document scores below its rejected one.
void verify_rescoring(std::span<const PreferenceTriplet> triplets, const Scorer& scorer);

struct GenerationStats {
  std::size_t emitted = 0;
  std::size_t skipped = 0;  // degenerate: all candidates identical
  std::size_t aborted = 0;  // DG games that stopped before a selected round
};

struct SgOptions {
  int samples = 5;
  double temperature = 0.8;
  std::string model;
  /// Write the initial document with the INIT prompt; otherwise start from
  /// the topic's seed document.
  bool generate_initial = true;
  double initial_temperature = 0.0;
  int word_target = 147;
  int word_max = 150;
  TiePolicy tie_policy = TiePolicy::Deterministic;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SgResult {
  std::vector<PreferenceTriplet> triplets;
  GenerationStats stats;
};

/// Best-and-worst-of-N: per topic, N independent NOFEEDBACK edits of one
/// initial document, ranked; emits (prompt, rank 1, rank N).
SgResult generate_sg(std::span<const Topic> topics, ChatProvider& chat, const Scorer& scorer,
                     const SgOptions& options,
                     const PromptTemplates& templates = PromptTemplates::builtin());

/// 3 for listwise prompts, 4 for pairwise, 1 otherwise.
std::vector<int> default_round_select(PromptKind kind);

struct DgOptions {
  std::vector<int> round_select;  // empty: default_round_select(config.prompt_kind)
  /// Agent whose prompt enters the triplet; empty selects the round's
  /// top-ranked agent.
  std::string focal_agent;
  int jobs = 1;
};

struct DgResult {
  std::vector<PreferenceTriplet> triplets;
  GenerationStats stats;
  CompetitionLog log;
};

/// Plays one game per topic and emits (focal prompt, top document, bottom
/// document) for each selected round.
DgResult generate_dg(std::span<const Topic> topics, const CompetitionConfig& config,
                     const GameServices& services, const DgOptions& options = {});

struct QuerySplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Seeded shuffle of the sorted distinct ids; round(10%) go to test.
QuerySplit split_queries(std::vector<std::string> query_ids, std::uint64_t seed);

struct DatasetManifest {
  std::size_t triplet_count = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t duplicates_removed = 0;
  std::size_t skipped = 0;
  QuerySplit split;
  std::string fingerprint;
  std::uint64_t seed = 0;
  nlohmann::json generation;  // free-form generation parameters
};

nlohmann::json to_json(const DatasetManifest& m);

/// Training hyperparameters recorded alongside each dataset for reference.
nlohmann::json advisory_hyperparameters();

/// Validates, deduplicates, splits by query id and writes train.jsonl,
/// test.jsonl and manifest.json under `dir`. Returns the manifest written.
DatasetManifest write_dataset(std::span<const PreferenceTriplet> triplets,
                              const std::filesystem::path& dir, std::uint64_t seed,
                              std::string fingerprint, std::size_t skipped = 0,
                              nlohmann::json generation = nlohmann::json::object());

/// Reads a JSON Lines triplet file; errors name file:line.
std::vector<PreferenceTriplet> read_triplets(const std::filesystem::path& path);

}  // namespace rankarena
