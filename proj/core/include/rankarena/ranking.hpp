// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankarena/corpus.hpp"

namespace rankarena {

class EmbeddingProvider;

struct ScoredDoc {
  std::string doc_id;
  std::string agent_id;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Documents of one (query, round) in rank order; entries[0] is rank 1.
struct Ranking {
  std::string query_id;
  int round = 0;
  std::vector<ScoredDoc> entries;

  /// 1-based rank of `agent_id`; throws ValidationError if absent.
  int rank_of(std::string_view agent_id) const;
  const ScoredDoc& top() const { return entries.front(); }
  const ScoredDoc& bottom() const { return entries.back(); }

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

struct Candidate {
  std::string agent_id;
  std::string doc_id;
  std::string text;
};

enum class TiePolicy {
  Deterministic,  // tied documents ordered by ascending agent id
  SeededRandom,   // tied groups shuffled uniformly from the seed
};

std::string_view to_string(TiePolicy policy);
TiePolicy tie_policy_from_string(std::string_view name);

/// A ranking function over (query, document text). Implementations are pure
/// given their providers and safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const Query& query, std::string_view doc_text) const = 0;
  /// Human-readable description recorded with every log and dataset.
  virtual std::string describe() const = 0;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Robertson idf with +1 smoothing: ln((N - df + 0.5) / (df + 0.5) + 1).
/// Non-negative for every df in [0, N].
double bm25_idf(std::size_t df, std::size_t doc_count);

/// Okapi BM25 summed over the query's tokens (a term repeated in the query
/// contributes once per occurrence).
double bm25_score(const Query& query, std::string_view doc_text, const CorpusStats& stats,
                  double k1, double b);

/// Cosine similarity; throws DegenerateVectorError on zero norm or
/// mismatched dimensions.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

double embed_score(const Query& query, std::string_view doc_text, EmbeddingProvider& embedder);

class Bm25Scorer final : public Scorer {
 public:
  Bm25Scorer(std::shared_ptr<const CorpusStats> stats, Bm25Params params = {});
  double score(const Query& query, std::string_view doc_text) const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const CorpusStats> stats_;
  Bm25Params params_;
};

/// Dense ranker: cosine similarity of query and document embeddings.
class EmbeddingScorer final : public Scorer {
 public:
  explicit EmbeddingScorer(std::shared_ptr<EmbeddingProvider> embedder);
  double score(const Query& query, std::string_view doc_text) const override;
  std::string describe() const override;

 private:
  std::shared_ptr<EmbeddingProvider> embedder_;
};

/// Mock ranker: number of document tokens equal to some query token.
class TermFrequencyScorer final : public Scorer {
 public:
  double score(const Query& query, std::string_view doc_text) const override;
  std::string describe() const override { return "term_frequency"; }
};

/// Mock ranker giving every document the same score, so the order is
/// decided entirely by the tie policy.
class ConstantScorer final : public Scorer {
 public:
  explicit ConstantScorer(double value = 0.0) : value_(value) {}
  double score(const Query&, std::string_view) const override { return value_; }
  std::string describe() const override;

 private:
  double value_;
};

/// Sorts pre-scored documents by score descending, resolving ties per
/// `policy`. Throws ValidationError on duplicate agents or non-finite scores.
Ranking order_by_score(std::string query_id, int round, std::vector<ScoredDoc> scored,
                       TiePolicy policy, std::uint64_t seed);

/// Scores and totally orders the candidates (one per agent).
Ranking rank(const Query& query, std::span<const Candidate> docs, const Scorer& scorer,
             TiePolicy policy, std::uint64_t seed, int round = 0);

}  // namespace rankarena
