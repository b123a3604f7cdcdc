// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "rankarena/align_math.hpp"
#include "rankarena/corpus.hpp"
#include "rankarena/datagen.hpp"
#include "rankarena/evaluation.hpp"
#include "rankarena/game.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/mock_providers.hpp"
#include "rankarena/ranking.hpp"
#include "run_config.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace rankarena;
using rankarena::testing::scripted;
using rankarena::testing::llm;
using rankarena::testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::vector<Topic> repo_topics() {
  return load_topics(fs::path(RANKARENA_SOURCE_DIR) / "data/topics.jsonl");
}

GameServices services_with(std::shared_ptr<const Scorer> scorer,
                           std::shared_ptr<ChatProvider> chat = nullptr) {
  GameServices s;
  s.scorer = std::move(scorer);
  s.chat_for = [chat](const AgentSpec&) { return chat; };
  return s;
}

// 1. Five identical agents under seeded-random ties split wins evenly.
Outcome random_baseline() {
  const auto start = Clock::now();
  CompetitionConfig config;
  for (int i = 1; i <= 5; ++i) {
    config.roster.push_back(scripted("noop-" + std::to_string(i), Strategy::Noop));
  }
  config.ranker.kind = RankerSpec::Kind::Constant;
  config.rounds = 30;
  config.tie_policy = TiePolicy::SeededRandom;
  config.seed = 2024;
  const auto topics = rankarena::testing::synthetic_topics(50);
  const auto log =
      run_competition(config, topics, services_with(std::make_shared<ConstantScorer>()));
  const double elapsed = seconds_since(start);
  double worst = 0;
  std::string rates;
  for (const auto& id : log.agent_ids()) {
    const double r = win_rate(log, id);
    worst = std::max(worst, std::abs(r - 0.2));
    rates += fmt("%.4f ", r);
  }
  return {worst <= 0.03 && elapsed < 10.0,
          "win-rates " + rates + fmt("max |r-0.2|=%.4f runtime=%.2fs", worst, elapsed)};
}

// 2. Scaled promotion against enumeration of the largest possible move,
// and per-game win-rate sums.
Outcome metric_oracles() {
  double worst = 0;
  int cases = 0;
  for (int n = 2; n <= 6; ++n) {
    for (int rt = 1; rt <= n; ++rt) {
      int reach = 0;
      for (int other = 1; other <= n; ++other) reach = std::max(reach, std::abs(rt - other));
      for (int rt1 = 1; rt1 <= n; ++rt1) {
        const double expected = static_cast<double>(rt - rt1) / reach;
        worst = std::max(worst, std::abs(scaled_promotion(rt, rt1, n) - expected));
        ++cases;
      }
    }
  }
  CompetitionConfig config;
  config.roster = {scripted("stuffer", Strategy::KeywordStuff), scripted("copier", Strategy::CopyTop),
                   scripted("mimic", Strategy::MimicWinnerPrefix), scripted("a", Strategy::Noop),
                   scripted("b", Strategy::Noop)};
  config.ranker.kind = RankerSpec::Kind::TermFrequency;
  config.rounds = 12;
  config.tie_policy = TiePolicy::SeededRandom;
  config.seed = 7;
  const auto topics = repo_topics();
  const auto log =
      run_competition(config, topics, services_with(std::make_shared<TermFrequencyScorer>()));
  double sum_error = 0;
  for (std::size_t g = 0; g < log.games.size(); ++g) {
    double sum = 0;
    for (const auto& id : log.agent_ids()) sum += per_game_win_rates(log, id)[g];
    sum_error = std::max(sum_error, std::abs(sum - 1.0));
  }
  return {worst == 0 && sum_error <= 1e-12,
          fmt("%.0f promotion cases, max error %.3g; max |sum win-rate - 1| = %.3g", cases, worst,
              sum_error)};
}

// 3. Loss at zero margin and gradient against central differences.
Outcome dpo_checks() {
  PreferenceLogProbs same{-12.5, -30.25, -12.5, -30.25};
  const double identity_error = std::abs(dpo_loss(same) - std::numbers::ln2);
  double grad_error = 0;
  const double h = 1e-5;
  for (double m : {-20.0, -3.0, 0.0, 1.5, 25.0}) {
    for (double beta : {0.1, 1.0}) {
      const double fd =
          (dpo_loss_from_margin(m + h, beta) - dpo_loss_from_margin(m - h, beta)) / (2 * h);
      grad_error = std::max(grad_error, std::abs(dpo_loss_grad_margin(m, beta) - fd));
    }
  }
  return {identity_error <= 1e-12 && grad_error <= 1e-6,
          fmt("|loss-ln2|=%.3g, max |grad-fd|=%.3g over 5 margins x 2 betas", identity_error,
              grad_error)};
}

double brute_bm25(const std::vector<std::string>& query_terms,
                  const std::vector<std::vector<std::string>>& docs, std::size_t d, double k1,
                  double b) {
  double avg = 0;
  for (const auto& doc : docs) avg += static_cast<double>(doc.size());
  avg /= static_cast<double>(docs.size());
  const double n = static_cast<double>(docs.size());
  double total = 0;
  for (const auto& term : query_terms) {
    double df = 0;
    for (const auto& doc : docs) df += std::count(doc.begin(), doc.end(), term) > 0 ? 1 : 0;
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    const double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
    const double len = static_cast<double>(docs[d].size());
    total += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg));
  }
  return total;
}

// 4. BM25 against a direct evaluation, and monotonicity in tf.
Outcome bm25_checks() {
  const std::vector<std::string> corpus = {
      "Solar panels convert sunlight into electricity for homes.",
      "Panel efficiency drops as the panels heat up in summer.",
      "Wind turbines and solar farms share the same grid.",
      "A garden needs water, sunlight and good soil.",
      "Tomatoes grow best in loose soil with compost.",
      "Electric cars charge from the grid overnight.",
      "Battery storage smooths solar output across the day.",
      "Cleaning panels twice a year keeps efficiency high.",
      "The museum opens a new exhibit on energy history.",
      "Grid operators balance supply and demand every minute."};
  const auto stats = std::make_shared<CorpusStats>(compute_stats(corpus));
  std::vector<std::vector<std::string>> tokens;
  for (const auto& d : corpus) tokens.push_back(tokenize(d));
  double worst = 0;
  for (const std::string q : {"solar panel efficiency", "grid", "soil compost garden",
                              "missing words only", "panels panels sunlight"}) {
    const Query query{"q", q};
    const auto qt = tokenize(q);
    for (double k1 : {1.2, 0.9, 2.0}) {
      for (double b : {0.75, 0.0, 1.0}) {
        for (std::size_t d = 0; d < corpus.size(); ++d) {
          worst = std::max(worst, std::abs(bm25_score(query, corpus[d], *stats, k1, b) -
                                           brute_bm25(qt, tokens, d, k1, b)));
        }
      }
    }
  }
  // Same length, one more occurrence of a query term: score must not drop.
  Rng rng(99);
  const std::vector<std::string> filler = {"river", "stone", "bright", "quiet", "paper", "cloud"};
  const Bm25Scorer scorer(stats);
  int violations = 0;
  const int fixtures = 500;
  for (int i = 0; i < fixtures; ++i) {
    const std::size_t len = 5 + rng.below(20);
    std::vector<std::string> words(len);
    for (auto& w : words) w = filler[rng.below(filler.size())];
    const std::size_t tf = rng.below(len);
    for (std::size_t j = 0; j < tf; ++j) words[j] = "solar";
    rng.shuffle(words.begin(), words.end());
    auto more = words;
    const auto it = std::find_if(more.begin(), more.end(), [](const auto& w) { return w != "solar"; });
    *it = "solar";
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& w : v) s += w + " ";
      return s;
    };
    const Query query{"q", "solar"};
    if (scorer.score(query, join(more)) <= scorer.score(query, join(words))) ++violations;
  }
  return {worst <= 1e-9 && violations == 0,
          fmt("max |bm25-oracle|=%.3g; tf monotonicity violations %.0f/%.0f", worst, violations,
              fixtures)};
}

// Exact two-sided sign-flip p-value over all 2^n patterns.
double exhaustive_p(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  double observed = 0;
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
    scale = std::max(scale, std::abs(d[i]));
  }
  observed = std::abs(observed);
  const double slack = 1e-9 * std::max(1.0, scale * static_cast<double>(n));
  std::size_t hits = 0;
  const std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1U) ? -d[i] : d[i];
    if (std::abs(s) >= observed - slack) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(patterns);
}

// 5. Null calibration and agreement with the exact test.
Outcome permutation_checks() {
  std::mt19937_64 gen(derive_seed(2025, "null"));
  std::normal_distribution<double> noise(0.0, 1.0);
  const int trials = 1000;
  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(30), b(30);
    for (int i = 0; i < 30; ++i) {
      const double base = noise(gen);
      a[i] = base + noise(gen);
      b[i] = base + noise(gen);
    }
    if (permutation_test(a, b, 10000, derive_seed(7, static_cast<std::uint64_t>(t))) < 0.05) {
      ++rejections;
    }
  }
  const double rate = static_cast<double>(rejections) / trials;

  double worst = 0;
  for (int f = 0; f < 5; ++f) {
    std::vector<double> a(10), b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = noise(gen) + 0.3 * f;
      b[i] = noise(gen);
    }
    const double mc = permutation_test(a, b, 10000, derive_seed(11, static_cast<std::uint64_t>(f)));
    worst = std::max(worst, std::abs(mc - exhaustive_p(a, b)));
  }
  return {rate >= 0.03 && rate <= 0.07 && worst <= 0.01,
          fmt("null rejection rate %.3f at alpha 0.05; max |mc-exact| %.4f over 5 fixtures", rate,
              worst)};
}

// 6. Normalized faithfulness and threshold counting.
Outcome faithfulness_checks() {
  LexicalOverlapNli lexical;
  FixedNli always(1.0);
  int checked = 0;
  int wrong = 0;
  for (const auto& topic : repo_topics()) {
    for (NliProvider* nli : std::initializer_list<NliProvider*>{&lexical, &always}) {
      if (raw_faith(topic.seed.text, topic.seed.text, *nli) <= 0) continue;
      ++checked;
      if (orig_faith(topic.seed.text, topic.seed.text, *nli) != 1.0) ++wrong;
    }
  }
  const std::string four = "First claim. Second claim. Third claim. Fourth claim.";
  const std::map<std::string, double> probs = {{"First claim.", 0.9},
                                               {"Second claim.", 0.6},
                                               {"Third claim.", 0.4},
                                               {"Fourth claim.", 0.1}};
  FunctionNli scripted_nli(
      [&](std::string_view, std::string_view h) { return probs.at(std::string(h)); });
  FixedNli one(1.0), zero(0.0);
  FixedNli at_threshold(0.5), below(std::nextafter(0.5, 0.0));
  const bool threshold_ok = raw_faith(four, "orig", scripted_nli) == 0.5 &&
                            raw_faith(four, "orig", one) == 1.0 &&
                            raw_faith(four, "orig", zero) == 0.0 &&
                            raw_faith(four, "orig", at_threshold) == 1.0 &&
                            raw_faith(four, "orig", below) == 0.0;
  // raw 3/5 against self-faith 4/5.
  const std::string five = "S1 one. S2 two. S3 three. S4 four. S5 five.";
  const std::string mod = "M1 a. M2 b. M3 c. M4 d. M5 e.";
  FunctionNli mixed([&](std::string_view premise, std::string_view h) {
    if (premise == five) {
      if (h.starts_with("S")) return h == "S5 five." ? 0.0 : 0.9;
      return (h == "M1 a." || h == "M2 b." || h == "M3 c.") ? 0.7 : 0.2;
    }
    return 0.0;
  });
  const double three_fifths_over_four_fifths = orig_faith(mod, five, mixed);
  const bool division_ok = std::abs(three_fifths_over_four_fifths - 0.75) <= 1e-15;
  return {checked > 0 && wrong == 0 && threshold_ok && division_ok,
          fmt("self-faith 1.0 on %.0f fixtures (%.0f wrong); threshold cases ", checked, wrong) +
              (threshold_ok ? "exact" : "WRONG") + fmt("; 0.6/0.8 -> %.17g", three_fifths_over_four_fifths)};
}

// 7. Every generated triplet re-scores in order; DG default rounds.
Outcome dataset_checks() {
  const auto topics = repo_topics();
  auto scorer = std::make_shared<TermFrequencyScorer>();
  auto chat = std::make_shared<MockChatProvider>();
  SgOptions sg;
  sg.model = "mock-model";
  sg.seed = 3;
  sg.tie_policy = TiePolicy::SeededRandom;
  const auto sg_result = generate_sg(topics, *chat, *scorer, sg);

  CompetitionConfig config;
  config.roster = {llm("a", "mock-model", 0.8), llm("b", "mock-model", 0.8),
                   llm("c", "mock-model", 0.8), scripted("stuffer", Strategy::KeywordStuff),
                   scripted("noop", Strategy::Noop)};
  config.ranker.kind = RankerSpec::Kind::TermFrequency;
  config.rounds = 6;
  config.tie_policy = TiePolicy::SeededRandom;
  std::vector<PreferenceTriplet> dg_all;
  bool rounds_ok = default_round_select(PromptKind::Lsw) == std::vector<int>{3} &&
                   default_round_select(PromptKind::Paw) == std::vector<int>{4};
  for (PromptKind kind : {PromptKind::Lsw, PromptKind::Paw}) {
    config.prompt_kind = kind;
    const auto dg = generate_dg(topics, config, services_with(scorer, chat));
    const int expected = kind == PromptKind::Lsw ? 3 : 4;
    for (const auto& t : dg.triplets) rounds_ok = rounds_ok && t.meta.round == expected;
    dg_all.insert(dg_all.end(), dg.triplets.begin(), dg.triplets.end());
  }
  std::size_t bad = 0;
  auto check = [&](const std::vector<PreferenceTriplet>& ts) {
    for (const auto& t : ts) {
      const Query q{t.meta.query_id, t.meta.query};
      if (scorer->score(q, t.chosen) < scorer->score(q, t.rejected)) ++bad;
    }
  };
  check(sg_result.triplets);
  check(dg_all);
  bool verified = true;
  try {
    verify_rescoring(sg_result.triplets, *scorer);
    verify_rescoring(dg_all, *scorer);
  } catch (const Error&) {
    verified = false;
  }
  const auto total = sg_result.triplets.size() + dg_all.size();
  return {bad == 0 && verified && rounds_ok && !sg_result.triplets.empty() && !dg_all.empty(),
          fmt("%.0f SG + %.0f DG triplets, %.0f out of order", static_cast<double>(sg_result.triplets.size()),
              static_cast<double>(dg_all.size()), static_cast<double>(bad)) +
              (rounds_ok ? "; DG rounds LSW=3 PAW=4" : "; DG round selection WRONG") +
              (total ? "" : "; no triplets")};
}

// 8. Cache replay and roster-order invariance.
Outcome determinism_checks() {
  TempDir dir;
  std::ostringstream config;
  config << "schema = 1\n"
         << "topics = \"" << (fs::path(RANKARENA_SOURCE_DIR) / "data/topics.jsonl").string() << "\"\n"
         << "output_dir = \"" << (dir / "runs").string() << "\"\n"
         << "offline = true\n"
         << "[competition]\nrounds = 8\nprompt = \"lsw\"\ntie_policy = \"seeded_random\"\nseed = 17\n"
         << "[ranker]\nkind = \"bm25\"\n"
         << "corpus = \"" << (fs::path(RANKARENA_SOURCE_DIR) / "data/corpus.jsonl").string() << "\"\n"
         << "[[agents]]\nid = \"llm\"\nkind = \"llm\"\nmodel = \"mock-model\"\ntemperature = 0.8\ncount = 3\n"
         << "[[agents]]\nid = \"stuffer\"\nkind = \"scripted\"\nstrategy = \"keyword_stuff\"\n"
         << "[[agents]]\nid = \"mimic\"\nkind = \"scripted\"\nstrategy = \"mimic_winner_prefix\"\n";
  rankarena::testing::spit(dir / "run.toml", config.str());
  auto run_config = cli::load_run_config(dir / "run.toml");
  cli::apply_overrides(run_config, {});
  const auto result = cli::cmd_compete(run_config);
  const auto report = cli::cmd_replay(result.run_dir);

  // Reverse the roster: per-agent texts must be identical round by round.
  auto reversed = run_config.competition;
  std::reverse(reversed.roster.begin(), reversed.roster.end());
  auto chat = std::make_shared<MockChatProvider>();
  auto scorer = std::make_shared<Bm25Scorer>(std::make_shared<CorpusStats>(
      compute_stats(load_corpus_texts(fs::path(RANKARENA_SOURCE_DIR) / "data/corpus.jsonl"))));
  const auto topics = repo_topics();
  const auto forward = run_competition(run_config.competition, topics, services_with(scorer, chat));
  const auto backward = run_competition(reversed, topics, services_with(scorer, chat));
  std::size_t compared = 0;
  std::size_t differing = 0;
  for (std::size_t g = 0; g < forward.games.size(); ++g) {
    const auto& fg = forward.games[g];
    const auto& bg = backward.games[g];
    if (fg.rounds.size() != bg.rounds.size()) {
      ++differing;
      continue;
    }
    for (std::size_t r = 0; r < fg.rounds.size(); ++r) {
      for (const auto& [id, doc] : fg.rounds[r].documents) {
        ++compared;
        if (bg.rounds[r].documents.at(id).text != doc.text) ++differing;
      }
    }
  }
  return {report.pass && differing == 0 && compared > 0,
          std::string("replay ") + (report.pass ? "byte-identical" : "FAILED: " + report.detail) +
              fmt("; roster reversal: %.0f/%.0f texts differ", static_cast<double>(differing),
                  static_cast<double>(compared))};
}

// 9. Keyword stuffing beats four resubmitting agents every round.
Outcome strategy_oracle() {
  const auto start = Clock::now();
  CompetitionConfig config;
  config.roster = {scripted("stuffer", Strategy::KeywordStuff)};
  for (int i = 1; i <= 4; ++i) config.roster.push_back(scripted("noop-" + std::to_string(i), Strategy::Noop));
  config.ranker.kind = RankerSpec::Kind::TermFrequency;
  config.rounds = 30;
  config.tie_policy = TiePolicy::SeededRandom;
  config.seed = 1;
  const auto topics = repo_topics();
  const auto log =
      run_competition(config, topics, services_with(std::make_shared<TermFrequencyScorer>()));
  const double elapsed = seconds_since(start);
  int rounds = 0;
  int lost = 0;
  for (const auto& game : log.games) {
    for (const auto& round : game.rounds) {
      ++rounds;
      if (round.ranking.entries.front().agent_id != "stuffer") ++lost;
    }
  }
  const double rate = win_rate(log, "stuffer");
  return {rate == 1.0 && lost == 0 && elapsed < 5.0,
          fmt("win-rate %.4f over %.0f rounds, runtime %.2fs", rate, rounds, elapsed)};
}

// 10. Free-marginal kappa fixtures.
Outcome kappa_checks() {
  const double perfect = free_marginal_kappa({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}, 3);
  const double derived = free_marginal_kappa({{0, 0, 1}, {1, 1, 1}}, 2);
  return {perfect == 1.0 && std::abs(derived - 1.0 / 3.0) <= 1e-12,
          fmt("perfect %.17g; 3-rater fixture %.17g", perfect, derived)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"random-baseline", random_baseline},     {"metric-oracles", metric_oracles},
      {"dpo-loss", dpo_checks},                 {"bm25", bm25_checks},
      {"permutation-test", permutation_checks}, {"faithfulness", faithfulness_checks},
      {"dataset-soundness", dataset_checks},    {"engine-determinism", determinism_checks},
      {"strategy-oracle", strategy_oracle},     {"kappa", kappa_checks},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %2zu %-20s %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
