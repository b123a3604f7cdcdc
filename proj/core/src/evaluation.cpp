// SPDX-License-Identifier: Apache-2.0
#include "rankarena/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/providers.hpp"
#include "rankarena/ranking.hpp"

namespace rankarena {
namespace {

void require_agent(const GameLog& game, std::string_view agent_id) {
  if (!game.initial.documents.contains(std::string(agent_id))) {
    throw ValidationError("agent '" + std::string(agent_id) + "' is not in game '" +
                          game.query.id + "'");
  }
}

const Document& doc_at(const GameLog& game, int round, std::string_view agent_id) {
  const auto& docs = game.at_round(round).documents;
  auto it = docs.find(std::string(agent_id));
  if (it == docs.end()) {
    throw ValidationError("agent '" + std::string(agent_id) + "' has no document in game '" +
                          game.query.id + "' round " + std::to_string(round));
  }
  return it->second;
}

/// Averages per-(game, round) values over games, for rounds 1..T. Games that
/// stopped early contribute only the rounds they played.
template <typename Fn>
MetricSeries round_mean(const CompetitionLog& log, std::string name, Fn&& per_round) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& game : log.games) {
    for (const auto& state : game.rounds) {
      auto& [sum, n] = acc[state.round];
      sum += per_round(game, state.round);
      ++n;
    }
  }
  if (acc.empty()) throw ValidationError(name + ": log has no played rounds");
  MetricSeries s;
  s.name = std::move(name);
  for (const auto& [round, sn] : acc) {
    s.index.push_back(round);
    s.values.push_back(sn.first / sn.second);
  }
  s.validate();
  return s;
}

class EmbeddingMemo {
 public:
  explicit EmbeddingMemo(EmbeddingProvider& embedder) : embedder_(embedder) {}
  const std::vector<double>& get(const std::string& text) {
    auto it = memo_.find(text);
    if (it == memo_.end()) it = memo_.emplace(text, embedder_.embed(text)).first;
    return it->second;
  }

 private:
  EmbeddingProvider& embedder_;
  std::map<std::string, std::vector<double>, std::less<>> memo_;
};

}  // namespace

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::PerGame ? "per_game" : "round_mean_over_games";
}

void MetricSeries::validate() const {
  if (index.size() != values.size()) {
    throw ValidationError("series '" + name + "': index and values differ in length");
  }
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i > 0 && index[i] <= index[i - 1]) {
      throw ValidationError("series '" + name + "': index not strictly increasing");
    }
    if (!std::isfinite(values[i])) {
      throw ValidationError("series '" + name + "': non-finite value at index " +
                            std::to_string(index[i]));
    }
  }
}

std::vector<double> per_game_win_rates(const CompetitionLog& log, std::string_view agent_id) {
  std::vector<double> out;
  for (const auto& game : log.games) {
    require_agent(game, agent_id);
    if (game.rounds.empty()) continue;
    int wins = 0;
    for (const auto& r : game.rounds) wins += r.ranking.top().agent_id == agent_id ? 1 : 0;
    out.push_back(static_cast<double>(wins) / static_cast<double>(game.rounds.size()));
  }
  return out;
}

double win_rate(const CompetitionLog& log, std::string_view agent_id) {
  const auto rates = per_game_win_rates(log, agent_id);
  if (rates.empty()) throw ValidationError("win_rate: no game has a played round");
  double sum = 0.0;
  for (double r : rates) sum += r;
  return sum / static_cast<double>(rates.size());
}

double scaled_promotion(int rank_t, int rank_t1, int n) {
  if (n < 2) throw ValidationError("scaled_promotion needs at least 2 ranked documents");
  if (rank_t < 1 || rank_t > n || rank_t1 < 1 || rank_t1 > n) {
    throw ValidationError("scaled_promotion: ranks must lie in [1, " + std::to_string(n) + "]");
  }
  const int denom = std::max(rank_t - 1, n - rank_t);
  if (denom == 0) throw ValidationError("scaled_promotion: zero denominator");
  return static_cast<double>(rank_t - rank_t1) / static_cast<double>(denom);
}

std::vector<std::string> split_sentences(std::string_view text) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  auto trim = [&](std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
  };
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() && is_space(text[i + 1])) {
      auto s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.emplace_back(s);
      start = i + 1;
    }
  }
  auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

double raw_faith(std::string_view modified, std::string_view original, NliProvider& nli) {
  const auto sentences = split_sentences(modified);
  if (sentences.empty()) throw ValidationError("raw_faith: modified document has no sentences");
  int entailed = 0;
  for (const auto& s : sentences) {
    if (nli.entail(original, s) >= kEntailmentThreshold) ++entailed;
  }
  return static_cast<double>(entailed) / static_cast<double>(sentences.size());
}

double orig_faith(std::string_view modified, std::string_view original, NliProvider& nli) {
  const double self = raw_faith(original, original, nli);
  if (self <= 0.0) {
    throw ValidationError("orig_faith: original document is not entailed by itself");
  }
  return std::clamp(raw_faith(modified, original, nli) / self, 0.0, 1.0);
}

MetricSeries diversity_series(const CompetitionLog& log, EmbeddingProvider& embedder) {
  EmbeddingMemo memo(embedder);
  return round_mean(log, "diversity", [&](const GameLog& game, int round) {
    const auto& docs = game.at_round(round).documents;
    if (docs.size() < 2) throw ValidationError("diversity needs at least 2 agents");
    std::vector<const std::vector<double>*> vecs;
    for (const auto& [agent, d] : docs) vecs.push_back(&memo.get(d.text));
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      for (std::size_t j = i + 1; j < vecs.size(); ++j) {
        lowest = std::min(lowest, cosine_similarity(*vecs[i], *vecs[j]));
      }
    }
    return lowest;
  });
}

MetricSeries convergence_series(const CompetitionLog& log, EmbeddingProvider& embedder,
                                std::string_view agent_id) {
  for (const auto& g : log.games) require_agent(g, agent_id);
  EmbeddingMemo memo(embedder);
  auto s = round_mean(log, "convergence", [&](const GameLog& game, int round) {
    return cosine_similarity(memo.get(doc_at(game, round - 1, agent_id).text),
                             memo.get(doc_at(game, round, agent_id).text));
  });
  return s;
}

MetricSeries score_series(const CompetitionLog& log, std::string_view agent_id) {
  for (const auto& g : log.games) require_agent(g, agent_id);
  return round_mean(log, "score", [&](const GameLog& game, int round) {
    for (const auto& e : game.at_round(round).ranking.entries) {
      if (e.agent_id == agent_id) return e.score;
    }
    throw ValidationError("no score for agent '" + std::string(agent_id) + "' in game '" +
                          game.query.id + "' round " + std::to_string(round));
  });
}

MetricSeries promotion_series(const CompetitionLog& log, std::string_view agent_id) {
  for (const auto& g : log.games) require_agent(g, agent_id);
  return round_mean(log, "scaled_promotion", [&](const GameLog& game, int round) {
    const auto& prev = game.at_round(round - 1).ranking;
    const auto& cur = game.at_round(round).ranking;
    return scaled_promotion(prev.rank_of(agent_id), cur.rank_of(agent_id),
                            static_cast<int>(cur.entries.size()));
  });
}

MetricSeries faith_series(const CompetitionLog& log, NliProvider& nli, std::string_view agent_id) {
  for (const auto& g : log.games) require_agent(g, agent_id);
  return round_mean(log, "faithfulness", [&](const GameLog& game, int round) {
    return orig_faith(doc_at(game, round, agent_id).text, game.seed_doc.text, nli);
  });
}

MetricSeries win_series(const CompetitionLog& log, std::string_view agent_id) {
  for (const auto& g : log.games) require_agent(g, agent_id);
  return round_mean(log, "win_rate", [&](const GameLog& game, int round) {
    return game.at_round(round).ranking.top().agent_id == agent_id ? 1.0 : 0.0;
  });
}

double permutation_test(std::span<const double> a, std::span<const double> b, int permutations,
                        std::uint64_t seed) {
  if (a.size() != b.size()) {
    throw ValidationError("permutation_test: samples differ in length (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ValidationError("permutation_test: empty samples");
  if (permutations < 1) throw ValidationError("permutation_test: permutations must be >= 1");

  const std::size_t n = a.size();
  std::vector<double> diff(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw ValidationError("permutation_test: non-finite sample");
    }
    diff[i] = a[i] - b[i];
    scale = std::max(scale, std::abs(diff[i]));
  }
  double observed = 0.0;
  for (double d : diff) observed += d;
  observed = std::abs(observed);
  // Sums are compared rather than means; the 1/n factor cancels. The slack
  // keeps exact ties from being lost to rounding.
  const double slack = 1e-9 * std::max(1.0, scale * static_cast<double>(n));

  Rng rng(seed);
  long long count = 0;
  for (int p = 0; p < permutations; ++p) {
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next();
      sum += (bits & 1U) ? diff[i] : -diff[i];
      bits >>= 1U;
    }
    if (std::abs(sum) >= observed - slack) ++count;
  }
  return static_cast<double>(count + 1) / static_cast<double>(permutations + 1);
}

double free_marginal_kappa(const std::vector<std::vector<int>>& annotations, int categories) {
  if (categories < 2) throw ValidationError("kappa: need at least 2 categories");
  if (annotations.empty()) throw ValidationError("kappa: no items");
  const std::size_t raters = annotations.front().size();
  if (raters < 2) throw ValidationError("kappa: need at least 2 raters");
  double po_sum = 0.0;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& row = annotations[i];
    if (row.size() != raters) {
      throw ValidationError("kappa: item " + std::to_string(i) + " has " +
                            std::to_string(row.size()) + " ratings, expected " +
                            std::to_string(raters));
    }
    std::vector<long long> counts(static_cast<std::size_t>(categories), 0);
    for (std::size_t r = 0; r < raters; ++r) {
      const int c = row[r];
      if (c == kMissingRating) {
        throw ValidationError("kappa: missing rating at item " + std::to_string(i) + ", rater " +
                              std::to_string(r));
      }
      if (c < 0 || c >= categories) {
        throw ValidationError("kappa: category " + std::to_string(c) + " out of range at item " +
                              std::to_string(i));
      }
      ++counts[static_cast<std::size_t>(c)];
    }
    long long agree = 0;
    for (long long nij : counts) agree += nij * (nij - 1);
    const auto n = static_cast<long long>(raters);
    po_sum += static_cast<double>(agree) / static_cast<double>(n * (n - 1));
  }
  const double po = po_sum / static_cast<double>(annotations.size());
  const double pe = 1.0 / static_cast<double>(categories);
  return (po - pe) / (1.0 - pe);
}

void write_series_csv(const std::filesystem::path& path, const MetricSeries& series) {
  series.validate();
  std::ostringstream body;
  body.precision(17);
  body << "round,value\n";
  for (std::size_t i = 0; i < series.index.size(); ++i) {
    body << series.index[i] << ',' << series.values[i] << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body.str();
}

nlohmann::json to_json(const MetricSeries& series) {
  double sum = 0.0;
  for (double v : series.values) sum += v;
  return {{"name", series.name},
          {"aggregation", std::string(to_string(series.aggregation))},
          {"rounds", series.index.size()},
          {"mean", series.values.empty() ? 0.0 : sum / static_cast<double>(series.values.size())},
          {"first", series.values.empty() ? 0.0 : series.values.front()},
          {"last", series.values.empty() ? 0.0 : series.values.back()}};
}

}  // namespace rankarena
