// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rankarena/game.hpp"

namespace rankarena {

class EmbeddingProvider;
class NliProvider;

/// Sentences scoring at least this entailment probability count as faithful.
inline constexpr double kEntailmentThreshold = 0.5;

enum class Aggregation { RoundMeanOverGames, PerGame };
std::string_view to_string(Aggregation aggregation);

struct MetricSeries {
  std::string name;
  Aggregation aggregation = Aggregation::RoundMeanOverGames;
  std::vector<int> index;  // round numbers, strictly increasing
  std::vector<double> values;

  /// Throws ValidationError on size mismatch, unsorted index or non-finite
  /// values.
  void validate() const;
};

/// Fraction of rounds `agent_id` ranks first, per game, in log order. Games
/// with no played rounds are skipped.
std::vector<double> per_game_win_rates(const CompetitionLog& log, std::string_view agent_id);

/// Mean of per_game_win_rates. Throws ValidationError if the agent is missing
/// from any game or no game has a played round.
double win_rate(const CompetitionLog& log, std::string_view agent_id);

/// (rank_t - rank_t1) / max(rank_t - 1, n - rank_t).
double scaled_promotion(int rank_t, int rank_t1, int n);

/// Splits on '.', '!' or '?' followed by whitespace; empty segments dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Fraction of sentences of `modified` entailed by `original`.
double raw_faith(std::string_view modified, std::string_view original, NliProvider& nli);

/// raw_faith(modified) / raw_faith(original, original), clamped to [0, 1].
double orig_faith(std::string_view modified, std::string_view original, NliProvider& nli);

/// Per round 1..T: minimum pairwise cosine similarity among the round's
/// documents, averaged over games.
MetricSeries diversity_series(const CompetitionLog& log, EmbeddingProvider& embedder);

/// Per round t in 1..T: cosine similarity of the agent's documents at t-1 and
/// t, averaged over games.
MetricSeries convergence_series(const CompetitionLog& log, EmbeddingProvider& embedder,
                                std::string_view agent_id);

/// Per round 1..T: the agent's ranker score, averaged over games.
MetricSeries score_series(const CompetitionLog& log, std::string_view agent_id);

/// Per round 1..T: scaled promotion from round t-1 to t, averaged over games.
MetricSeries promotion_series(const CompetitionLog& log, std::string_view agent_id);

/// Per round 1..T: orig_faith of the agent's document against the seed
/// document, averaged over games.
MetricSeries faith_series(const CompetitionLog& log, NliProvider& nli, std::string_view agent_id);

/// Per round 1..T: 1 if the agent ranked first, averaged over games.
MetricSeries win_series(const CompetitionLog& log, std::string_view agent_id);

/// Two-tailed paired permutation test: random sign flips of a[i] - b[i],
/// statistic |mean difference|, p = (c + 1) / (P + 1).
double permutation_test(std::span<const double> a, std::span<const double> b,
                        int permutations = 10000, std::uint64_t seed = 0);

inline constexpr int kMissingRating = -1;

/// Free-marginal multi-rater kappa. `annotations[i][r]` is rater r's category
/// (0-based) for item i; kMissingRating or a ragged row is an error.
double free_marginal_kappa(const std::vector<std::vector<int>>& annotations, int categories);

/// `round,value` rows.
void write_series_csv(const std::filesystem::path& path, const MetricSeries& series);
nlohmann::json to_json(const MetricSeries& series);

}  // namespace rankarena
