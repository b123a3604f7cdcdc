// SPDX-License-Identifier: Apache-2.0
#include "rankarena/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/providers.hpp"

namespace rankarena {

int Ranking::rank_of(std::string_view agent_id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].agent_id == agent_id) return static_cast<int>(i) + 1;
  }
  throw ValidationError("agent '" + std::string(agent_id) + "' not in ranking of query '" +
                        query_id + "' round " + std::to_string(round));
}

std::string_view to_string(TiePolicy policy) {
  return policy == TiePolicy::Deterministic ? "deterministic" : "seeded_random";
}

TiePolicy tie_policy_from_string(std::string_view name) {
  if (name == "deterministic") return TiePolicy::Deterministic;
  if (name == "seeded_random") return TiePolicy::SeededRandom;
  throw ConfigError("unknown tie policy '" + std::string(name) +
                    "' (expected deterministic or seeded_random)");
}

double bm25_idf(std::size_t df, std::size_t doc_count) {
  const double n = static_cast<double>(doc_count);
  const double d = static_cast<double>(df);
  return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

double bm25_score(const Query& query, std::string_view doc_text, const CorpusStats& stats,
                  double k1, double b) {
  const auto query_terms = tokenize(query.text);
  if (query_terms.empty()) return 0.0;
  const auto doc_terms = tokenize(doc_text);
  std::unordered_map<std::string, std::size_t> tf;
  for (const auto& t : doc_terms) ++tf[t];

  const double len_norm = static_cast<double>(doc_terms.size()) / stats.avg_doc_len();
  double score = 0.0;
  for (const auto& t : query_terms) {
    const auto it = tf.find(t);
    if (it == tf.end()) continue;
    const double f = static_cast<double>(it->second);
    score += bm25_idf(stats.df(t), stats.doc_count()) * f * (k1 + 1.0) /
             (f + k1 * (1.0 - b + b * len_norm));
  }
  return score;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DegenerateVectorError("cosine similarity of vectors with dimensions " +
                                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateVectorError("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double embed_score(const Query& query, std::string_view doc_text, EmbeddingProvider& embedder) {
  const auto q = embedder.embed(query.text);
  const auto d = embedder.embed(doc_text);
  return cosine_similarity(q, d);
}

Bm25Scorer::Bm25Scorer(std::shared_ptr<const CorpusStats> stats, Bm25Params params)
    : stats_(std::move(stats)), params_(params) {
  if (!stats_) throw ValidationError("BM25 scorer needs corpus statistics");
  if (params_.k1 < 0.0) throw ValidationError("BM25 k1 must be non-negative");
  if (params_.b < 0.0 || params_.b > 1.0) throw ValidationError("BM25 b must lie in [0, 1]");
}

double Bm25Scorer::score(const Query& query, std::string_view doc_text) const {
  return bm25_score(query, doc_text, *stats_, params_.k1, params_.b);
}

std::string Bm25Scorer::describe() const {
  std::ostringstream out;
  out << "bm25(k1=" << params_.k1 << ",b=" << params_.b << ",N=" << stats_->doc_count() << ")";
  return out.str();
}

EmbeddingScorer::EmbeddingScorer(std::shared_ptr<EmbeddingProvider> embedder)
    : embedder_(std::move(embedder)) {
  if (!embedder_) throw ValidationError("dense scorer needs an embedding provider");
}

double EmbeddingScorer::score(const Query& query, std::string_view doc_text) const {
  return embed_score(query, doc_text, *embedder_);
}

std::string EmbeddingScorer::describe() const { return "dense(" + embedder_->model() + ")"; }

double TermFrequencyScorer::score(const Query& query, std::string_view doc_text) const {
  const auto q = tokenize(query.text);
  const std::set<std::string> terms(q.begin(), q.end());
  const auto d = tokenize(doc_text);
  return static_cast<double>(
      std::count_if(d.begin(), d.end(), [&](const std::string& t) { return terms.contains(t); }));
}

std::string ConstantScorer::describe() const {
  std::ostringstream out;
  out << "constant(" << value_ << ")";
  return out.str();
}

Ranking order_by_score(std::string query_id, int round, std::vector<ScoredDoc> scored,
                       TiePolicy policy, std::uint64_t seed) {
  std::set<std::string> agents;
  for (const auto& s : scored) {
    if (!std::isfinite(s.score)) {
      throw ValidationError("non-finite score for agent '" + s.agent_id + "'");
    }
    if (!agents.insert(s.agent_id).second) {
      throw ValidationError("duplicate agent '" + s.agent_id + "' in ranking input");
    }
  }
  // Canonical order first, so the result never depends on input order.
  std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.agent_id < b.agent_id;
  });
  if (policy == TiePolicy::SeededRandom) {
    Rng rng(seed);
    auto first = scored.begin();
    while (first != scored.end()) {
      auto last = std::find_if(first, scored.end(),
                               [&](const ScoredDoc& s) { return s.score != first->score; });
      if (last - first > 1) rng.shuffle(first, last);
      first = last;
    }
  }
  return Ranking{std::move(query_id), round, std::move(scored)};
}

Ranking rank(const Query& query, std::span<const Candidate> docs, const Scorer& scorer,
             TiePolicy policy, std::uint64_t seed, int round) {
  if (docs.empty()) throw ValidationError("rank: no documents to rank");
  std::vector<ScoredDoc> scored;
  scored.reserve(docs.size());
  for (const auto& d : docs) {
    scored.push_back(ScoredDoc{d.doc_id, d.agent_id, scorer.score(query, d.text)});
  }
  return order_by_score(query.id, round, std::move(scored), policy, seed);
}

}  // namespace rankarena
