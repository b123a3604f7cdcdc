// SPDX-License-Identifier: Apache-2.0
#include <memory>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "rankarena/corpus.hpp"
#include "rankarena/evaluation.hpp"
#include "rankarena/game.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/ranking.hpp"

namespace {

using namespace rankarena;

std::string synthetic_doc(Rng& rng, int words) {
  static const char* vocab[] = {"solar", "panel", "grid",  "battery", "garden", "soil",
                                "river", "stone", "quiet", "bright",  "charge", "winter"};
  std::string out;
  for (int i = 0; i < words; ++i) {
    out += vocab[rng.below(12)];
    out += ' ';
  }
  return out;
}

std::shared_ptr<CorpusStats> synthetic_stats() {
  Rng rng(1);
  std::vector<std::string> docs;
  for (int i = 0; i < 200; ++i) docs.push_back(synthetic_doc(rng, 120));
  return std::make_shared<CorpusStats>(compute_stats(docs));
}

void BM_Bm25Score(benchmark::State& state) {
  const auto stats = synthetic_stats();
  Rng rng(2);
  const auto doc = synthetic_doc(rng, static_cast<int>(state.range(0)));
  const Query q{"q", "solar panel battery charge"};
  for (auto _ : state) benchmark::DoNotOptimize(bm25_score(q, doc, *stats, 1.2, 0.75));
}
BENCHMARK(BM_Bm25Score)->Arg(50)->Arg(150)->Arg(600);

void BM_RankFive(benchmark::State& state) {
  const Bm25Scorer scorer(synthetic_stats());
  Rng rng(3);
  std::vector<Candidate> docs;
  for (int i = 0; i < 5; ++i) {
    const auto id = "a" + std::to_string(i);
    docs.push_back({id, "q/1/" + id, synthetic_doc(rng, 150)});
  }
  const Query q{"q", "solar panel battery charge"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank(q, docs, scorer, TiePolicy::SeededRandom, 9, 1));
  }
}
BENCHMARK(BM_RankFive);

void BM_PermutationTest(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> a(30), b(30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_test(a, b, static_cast<int>(state.range(0)), 5));
  }
}
BENCHMARK(BM_PermutationTest)->Arg(1000)->Arg(10000);

void BM_ScriptedGame(benchmark::State& state) {
  CompetitionConfig config;
  const Strategy strategies[] = {Strategy::KeywordStuff, Strategy::CopyTop,
                                 Strategy::MimicWinnerPrefix, Strategy::Noop, Strategy::Noop};
  for (int i = 0; i < 5; ++i) {
    AgentSpec a;
    a.id = "agent-" + std::to_string(i);
    a.kind = AgentKind::Scripted;
    a.strategy = strategies[i];
    config.roster.push_back(a);
  }
  config.ranker.kind = RankerSpec::Kind::Bm25;
  config.rounds = static_cast<int>(state.range(0));
  config.tie_policy = TiePolicy::SeededRandom;
  Rng rng(6);
  Topic topic;
  topic.query = Query{"q1", "solar panel battery"};
  const auto seed = synthetic_doc(rng, 100);
  topic.seed = SeedDocument{"q1", seed, word_count(seed)};
  GameServices services;
  services.scorer = std::make_shared<Bm25Scorer>(synthetic_stats());
  for (auto _ : state) benchmark::DoNotOptimize(run_game(config, topic, services));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScriptedGame)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
