// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rankarena/cache.hpp"
#include "rankarena/corpus.hpp"
#include "rankarena/datagen.hpp"
#include "rankarena/evaluation.hpp"
#include "rankarena/game_io.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/http_providers.hpp"
#include "rankarena/log.hpp"
#include "rankarena/mock_providers.hpp"
#include "rankarena/providers.hpp"
#include "rankarena/templates.hpp"

namespace rankarena::cli {
namespace fs = std::filesystem;

namespace {

enum class Backend { Live, Mock, CacheOnly };

std::string env_or(const std::string& value, const char* env) {
  if (!value.empty()) return value;
  const char* v = std::getenv(env);
  return v ? std::string(v) : std::string{};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

/// Providers for one command, all behind one response cache.
class Runtime {
 public:
  Runtime(const RunConfig& config, Backend backend)
      : config_(config),
        backend_(backend),
        limiter_(std::make_shared<InflightLimiter>(config.providers.max_inflight)) {
    auto dir = config.cache_dir.empty() ? config.output_dir / "cache" : config.cache_dir;
    // Mock and live responses share request keys, so they live apart.
    cache_ = std::make_shared<ResponseCache>(dir / (config.offline ? "mock" : "live"));
  }

  std::shared_ptr<ChatProvider> chat(const std::string& endpoint) {
    std::lock_guard lock(mutex_);
    auto& slot = chats_[endpoint];
    if (slot) return slot;
    std::shared_ptr<ChatProvider> inner;
    if (backend_ == Backend::Mock) {
      inner = std::make_shared<MockChatProvider>();
    } else if (backend_ == Backend::Live) {
      const auto url = env_or(endpoint.empty() ? config_.providers.chat_url : endpoint, kChatUrlEnv);
      if (url.empty()) {
        log::warn("no chat endpoint configured; only cached responses are available");
      } else {
        inner = std::make_shared<HttpChatProvider>(http(url));
      }
    }
    slot = std::make_shared<CachedChatProvider>(inner, cache_);
    return slot;
  }

  std::shared_ptr<EmbeddingProvider> embedder(const std::string& model) {
    std::lock_guard lock(mutex_);
    auto& slot = embedders_[model];
    if (slot) return slot;
    std::shared_ptr<EmbeddingProvider> inner;
    if (backend_ == Backend::Mock || model.rfind("hashed-bow", 0) == 0) {
      inner = std::make_shared<HashedBowEmbedder>();
    } else if (backend_ == Backend::Live) {
      const auto url = env_or(config_.providers.embed_url, kEmbedUrlEnv);
      if (url.empty()) {
        log::warn("no embedding endpoint configured; only cached responses are available");
      } else {
        inner = std::make_shared<HttpEmbeddingProvider>(model, http(url));
      }
    }
    slot = std::make_shared<CachedEmbeddingProvider>(model, inner, cache_);
    return slot;
  }

  std::shared_ptr<NliProvider> nli() {
    std::lock_guard lock(mutex_);
    if (nli_) return nli_;
    std::shared_ptr<NliProvider> inner;
    if (backend_ == Backend::Mock) {
      inner = std::make_shared<LexicalOverlapNli>();
    } else if (backend_ == Backend::Live) {
      const auto url = env_or(config_.providers.nli_url, kNliUrlEnv);
      if (url.empty()) {
        log::warn("no NLI endpoint configured; only cached responses are available");
      } else {
        inner = std::make_shared<HttpNliProvider>(config_.providers.nli_model, http(url));
      }
    }
    nli_ = std::make_shared<CachedNliProvider>(config_.providers.nli_model, inner, cache_);
    return nli_;
  }

 private:
  HttpOptions http(const std::string& url) const {
    HttpOptions o;
    o.url = url;
    o.api_key = env_or({}, kChatKeyEnv);
    o.timeout = std::chrono::seconds(config_.providers.timeout_s);
    o.max_retries = config_.providers.max_retries;
    o.limiter = limiter_;
    return o;
  }

  const RunConfig& config_;
  Backend backend_;
  std::shared_ptr<InflightLimiter> limiter_;
  std::shared_ptr<ResponseCache> cache_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<ChatProvider>> chats_;
  std::map<std::string, std::shared_ptr<EmbeddingProvider>> embedders_;
  std::shared_ptr<NliProvider> nli_;
};

Backend backend_for(const RunConfig& config) {
  return config.offline ? Backend::Mock : Backend::Live;
}

std::vector<Topic> select_topics(const RunConfig& config) {
  if (!fs::exists(config.topics)) {
    throw ConfigError("topics file not found: " + config.topics.string());
  }
  auto topics = load_topics(config.topics);
  if (config.games > 0) {
    if (static_cast<std::size_t>(config.games) > topics.size()) {
      log::warn("config asks for " + std::to_string(config.games) + " games but " +
                config.topics.string() + " has " + std::to_string(topics.size()) + " topics");
    } else {
      topics.resize(static_cast<std::size_t>(config.games));
    }
  }
  return topics;
}

std::string topics_jsonl(const std::vector<Topic>& topics) {
  std::string out;
  for (const auto& t : topics) {
    out += nlohmann::json{{"query_id", t.query.id}, {"query", t.query.text}, {"seed_doc", t.seed.text}}
               .dump() +
           "\n";
  }
  return out;
}

std::string corpus_digest(const RunConfig& config) {
  const auto& path = config.competition.ranker.corpus_path;
  if (config.competition.ranker.kind != RankerSpec::Kind::Bm25 || path.empty()) return {};
  return sha256_hex(read_file(path));
}

std::shared_ptr<const Scorer> build_scorer(const RunConfig& config, const std::vector<Topic>& topics,
                                           Runtime& runtime) {
  const auto& r = config.competition.ranker;
  switch (r.kind) {
    case RankerSpec::Kind::Bm25: {
      std::vector<std::string> texts;
      if (r.corpus_path.empty()) {
        for (const auto& t : topics) texts.push_back(t.seed.text);
      } else {
        texts = load_corpus_texts(r.corpus_path);
      }
      auto stats = std::make_shared<const CorpusStats>(compute_stats(texts));
      return std::make_shared<Bm25Scorer>(stats, r.bm25);
    }
    case RankerSpec::Kind::Dense:
      return std::make_shared<EmbeddingScorer>(runtime.embedder(r.embed_model));
    case RankerSpec::Kind::TermFrequency:
      return std::make_shared<TermFrequencyScorer>();
    case RankerSpec::Kind::Constant:
      return std::make_shared<ConstantScorer>(r.constant);
  }
  throw ConfigError("unsupported ranker");
}

GameServices services_for(const RunConfig& config, const std::vector<Topic>& topics,
                          Runtime& runtime) {
  GameServices s;
  s.scorer = build_scorer(config, topics, runtime);
  s.chat_for = [&runtime](const AgentSpec& a) { return runtime.chat(a.endpoint); };
  return s;
}

std::string competition_fingerprint(const RunConfig& config, const std::string& topics_text) {
  nlohmann::json salt{{"topics", sha256_hex(topics_text)},
                      {"corpus", corpus_digest(config)},
                      {"offline", config.offline},
                      {"templates", PromptTemplates::builtin().version}};
  return config_fingerprint(config.competition, canonicalize(salt));
}

nlohmann::json win_rate_summary(const CompetitionLog& log, int permutations, std::uint64_t seed) {
  const auto agents = log.agent_ids();
  std::map<std::string, std::vector<double>> per_game;
  std::map<std::string, double> rates;
  for (const auto& a : agents) {
    per_game[a] = per_game_win_rates(log, a);
    rates[a] = win_rate(log, a);
  }
  double worst_sum_error = 0.0;
  for (std::size_t g = 0; g < per_game.begin()->second.size(); ++g) {
    double sum = 0.0;
    for (const auto& a : agents) sum += per_game[a][g];
    worst_sum_error = std::max(worst_sum_error, std::abs(sum - 1.0));
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& a : agents) {
    std::string best;
    for (const auto& b : agents) {
      if (b != a && (best.empty() || rates[b] > rates[best])) best = b;
    }
    const double p = permutation_test(per_game[a], per_game[best], permutations,
                                      derive_seed(seed, "permutation:" + a));
    rows.push_back({{"agent", a},
                    {"win_rate", rates[a]},
                    {"per_game", per_game[a]},
                    {"best_opponent", best},
                    {"best_opponent_win_rate", rates[best]},
                    {"p_value", p},
                    {"significant", p < 0.05}});
  }
  return {{"agents", rows},
          {"games", per_game.begin()->second.size()},
          {"max_per_game_sum_error", worst_sum_error},
          {"permutations", permutations}};
}

std::string format_summary(const nlohmann::json& summary) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "agent" << std::right << std::setw(10) << "win_rate"
      << "  " << std::left << std::setw(24) << "best_opponent" << std::right << std::setw(10)
      << "p_value" << "  sig\n";
  out << std::fixed;
  for (const auto& row : summary.at("agents")) {
    out << std::left << std::setw(24) << row.at("agent").get<std::string>() << std::right
        << std::setw(10) << std::setprecision(4) << row.at("win_rate").get<double>() << "  "
        << std::left << std::setw(24) << row.at("best_opponent").get<std::string>() << std::right
        << std::setw(10) << std::setprecision(4) << row.at("p_value").get<double>() << "  "
        << (row.at("significant").get<bool>() ? "*" : "") << "\n";
  }
  out << "games: " << summary.at("games").get<std::size_t>() << "\n";
  return out.str();
}

struct Played {
  CompetitionLog log;
  std::string fingerprint;
  std::string topics_text;
  std::string ranker;
};

Played play(const RunConfig& config, const std::vector<Topic>& topics, Backend backend) {
  Runtime runtime(config, backend);
  Played p;
  p.topics_text = topics_jsonl(topics);
  p.fingerprint = competition_fingerprint(config, p.topics_text);
  auto services = services_for(config, topics, runtime);
  p.ranker = services.scorer->describe();
  p.log = run_competition(config.competition, topics, services, config.jobs, p.fingerprint);
  return p;
}

LogWriteOptions write_options(const Played& p) {
  return {p.ranker, PromptTemplates::builtin().version};
}

std::vector<std::string> game_files(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::exists(dir / "games")) return out;
  for (const auto& e : fs::directory_iterator(dir / "games")) {
    out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

/// First difference between two run directories, or empty if identical.
std::string first_divergence(const fs::path& original, const fs::path& replayed) {
  const auto a = game_files(original);
  const auto b = game_files(replayed);
  if (a != b) return "the set of game files differs";
  for (const auto& name : a) {
    const auto la = lines_of(read_file(original / "games" / name));
    const auto lb = lines_of(read_file(replayed / "games" / name));
    const auto n = std::max(la.size(), lb.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= la.size() || i >= lb.size() || la[i] != lb[i]) {
        return "games/" + name + ": first divergent round " + std::to_string(i);
      }
    }
    if (read_file(original / "games" / name) != read_file(replayed / "games" / name)) {
      return "games/" + name + ": trailing bytes differ";
    }
  }
  if (read_file(original / "manifest.json") != read_file(replayed / "manifest.json")) {
    return "manifest.json differs";
  }
  return {};
}

fs::path normalize_dir(const fs::path& dir) {
  auto p = fs::absolute(dir).lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p;
}

RunConfig load_run_dir_config(const fs::path& run_dir, const Overrides& overrides) {
  const auto path = run_dir / "run.json";
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  auto config = run_config_from_json(doc, run_dir, path.string());
  config.topics = run_dir / "topics.jsonl";
  config.games = 0;
  if (overrides.cache_dir) config.cache_dir = *overrides.cache_dir;
  if (overrides.jobs) config.jobs = *overrides.jobs;
  if (overrides.offline) config.offline = true;
  return config;
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.out) config.output_dir = fs::absolute(*o.out);
  if (o.cache_dir) config.cache_dir = fs::absolute(*o.cache_dir);
  if (o.offline) config.offline = true;
  if (o.seed) config.competition.seed = *o.seed;
  if (o.jobs) config.jobs = *o.jobs;
  if (config.cache_dir.empty()) config.cache_dir = config.output_dir / "cache";
}

CompeteResult cmd_compete(const RunConfig& config) {
  const auto topics = select_topics(config);
  auto played = play(config, topics, backend_for(config));

  CompeteResult result;
  result.run_dir = config.output_dir / played.fingerprint;
  fs::create_directories(result.run_dir);
  write_file(result.run_dir / "run.json", to_json(config).dump(2) + "\n");
  write_file(result.run_dir / "topics.jsonl", played.topics_text);
  write_competition(result.run_dir, played.log, write_options(played));

  for (const auto& g : played.log.games) result.aborted += g.status == GameStatus::Aborted;
  bool any_rounds = false;
  for (const auto& g : played.log.games) any_rounds |= !g.rounds.empty();
  if (any_rounds) {
    const auto summary =
        win_rate_summary(played.log, config.eval.permutations, config.competition.seed);
    write_file(result.run_dir / "summary.json", summary.dump(2) + "\n");
    write_file(result.run_dir / "summary.txt", format_summary(summary));
  }
  result.log = std::move(played.log);
  return result;
}

DatagenResult cmd_datagen(const RunConfig& config, std::string mode) {
  if (mode.empty()) mode = config.datagen.mode;
  if (mode != "sg" && mode != "dg") throw ConfigError("datagen mode must be 'sg' or 'dg'");
  const auto topics = select_topics(config);
  const auto topics_text = topics_jsonl(topics);

  auto key = to_json(config);
  for (const char* k : {"output_dir", "cache_dir", "jobs", "eval", "name", "topics"}) key.erase(k);
  key["topics_digest"] = sha256_hex(topics_text);
  key["corpus_digest"] = corpus_digest(config);
  key["mode"] = mode;
  key["templates"] = PromptTemplates::builtin().version;
  const auto fingerprint = sha256_hex(canonicalize(key)).substr(0, 16);

  Runtime runtime(config, backend_for(config));
  auto services = services_for(config, topics, runtime);
  const auto& d = config.datagen;
  std::vector<PreferenceTriplet> triplets;
  GenerationStats stats;
  nlohmann::json generation{{"mode", mode}, {"ranker", services.scorer->describe()}};

  const auto dir = config.output_dir / fingerprint / ("dataset-" + mode);
  if (mode == "sg") {
    if (d.model.empty()) throw ConfigError("datagen.model is required for sg");
    SgOptions o;
    o.samples = d.samples;
    o.temperature = d.temperature;
    o.model = d.model;
    o.generate_initial = d.generate_initial;
    o.word_target = config.competition.word_target;
    o.word_max = config.competition.word_max;
    o.tie_policy = config.competition.tie_policy;
    o.seed = config.competition.seed;
    o.jobs = config.jobs;
    auto r = generate_sg(topics, *runtime.chat({}), *services.scorer, o);
    triplets = std::move(r.triplets);
    stats = r.stats;
    generation["samples"] = o.samples;
    generation["temperature"] = o.temperature;
    generation["model"] = o.model;
    generation["initial_document"] = o.generate_initial ? "generated" : "topic";
  } else {
    DgOptions o;
    o.round_select = d.round_select;
    o.focal_agent = d.focal_agent;
    o.jobs = config.jobs;
    try {
      auto r = generate_dg(topics, config.competition, services, o);
      triplets = std::move(r.triplets);
      stats = r.stats;
      write_competition(dir / "competition", r.log,
                        {services.scorer->describe(), PromptTemplates::builtin().version});
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    generation["round_select"] = o.round_select.empty()
                                     ? default_round_select(config.competition.prompt_kind)
                                     : o.round_select;
    generation["focal_agent"] = o.focal_agent.empty() ? "top_ranked" : o.focal_agent;
    generation["agents"] = config.competition.roster.size();
    generation["rounds"] = config.competition.rounds;
    generation["aborted_games"] = stats.aborted;
  }

  try {
    verify_rescoring(triplets, *services.scorer);
  } catch (const ValidationError& e) {
    throw VerificationFailure(std::string("re-scoring check failed: ") + e.what());
  }
  generation["skipped_degenerate"] = stats.skipped;
  const auto manifest = write_dataset(triplets, dir, config.competition.seed, fingerprint,
                                      stats.skipped + stats.aborted, generation);
  write_file(config.output_dir / fingerprint / "run.json", to_json(config).dump(2) + "\n");
  return {dir, manifest.triplet_count, stats.skipped + stats.aborted};
}

const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names{"win_rate",  "scaled_promotion", "score",
                                              "diversity", "convergence",      "faithfulness"};
  return names;
}

fs::path cmd_eval(const fs::path& run_dir_arg, std::vector<std::string> metrics,
                  const Overrides& overrides) {
  const auto run_dir = normalize_dir(run_dir_arg);
  const auto config = load_run_dir_config(run_dir, overrides);
  if (metrics.empty()) metrics = config.eval.metrics;
  if (metrics.empty()) throw ConfigError("no metrics requested");
  for (const auto& m : metrics) {
    if (std::find(known_metrics().begin(), known_metrics().end(), m) == known_metrics().end()) {
      throw ConfigError("unknown metric '" + m + "'");
    }
  }
  const auto log = read_competition(run_dir);
  for (const auto& g : log.games) {
    if (g.status != GameStatus::Complete) {
      throw ValidationError("game '" + g.query.id + "' is incomplete: " + g.error);
    }
  }
  const auto out = run_dir / "eval";
  fs::create_directories(out);
  Runtime runtime(config, backend_for(config));
  const auto agents = log.agent_ids();

  auto per_agent = [&](const std::string& metric, auto&& series_for) {
    nlohmann::json summary{{"metric", metric}, {"agents", nlohmann::json::object()}};
    for (const auto& a : agents) {
      const MetricSeries s = series_for(a);
      write_series_csv(out / (metric + "__" + a + ".csv"), s);
      summary["agents"][a] = to_json(s);
    }
    return summary;
  };

  for (const auto& m : metrics) {
    nlohmann::json summary;
    if (m == "win_rate") {
      summary = win_rate_summary(log, config.eval.permutations, config.competition.seed);
      summary["metric"] = m;
      for (const auto& a : agents) write_series_csv(out / (m + "__" + a + ".csv"), win_series(log, a));
    } else if (m == "scaled_promotion") {
      summary = per_agent(m, [&](const std::string& a) { return promotion_series(log, a); });
    } else if (m == "score") {
      summary = per_agent(m, [&](const std::string& a) { return score_series(log, a); });
    } else if (m == "diversity") {
      auto embedder = runtime.embedder(config.eval.embed_model);
      const auto s = diversity_series(log, *embedder);
      write_series_csv(out / "diversity.csv", s);
      summary = {{"metric", m}, {"series", to_json(s)}, {"embed_model", config.eval.embed_model}};
    } else if (m == "convergence") {
      auto embedder = runtime.embedder(config.eval.embed_model);
      summary = per_agent(m, [&](const std::string& a) { return convergence_series(log, *embedder, a); });
      summary["embed_model"] = config.eval.embed_model;
    } else if (m == "faithfulness") {
      auto nli = runtime.nli();
      summary = per_agent(m, [&](const std::string& a) { return faith_series(log, *nli, a); });
      summary["nli_model"] = nli->model();
    }
    write_file(out / (m + ".json"), summary.dump(2) + "\n");
  }
  return out;
}

ReplayReport cmd_replay(const fs::path& run_dir_arg, const Overrides& overrides) {
  const auto run_dir = normalize_dir(run_dir_arg);
  const auto config = load_run_dir_config(run_dir, overrides);
  const auto topics = load_topics(config.topics);
  auto played = play(config, topics, Backend::CacheOnly);
  if (played.fingerprint != run_dir.filename().string()) {
    log::warn("run directory name does not match the recomputed fingerprint " + played.fingerprint);
  }
  for (const auto& g : played.log.games) {
    if (g.status == GameStatus::Aborted) {
      return {false, "game '" + g.query.id + "' could not be replayed: " + g.error};
    }
  }
  const auto scratch = run_dir / ".replay";
  fs::remove_all(scratch);
  write_competition(scratch, played.log, write_options(played));
  auto diff = first_divergence(run_dir, scratch);
  fs::remove_all(scratch);
  if (!diff.empty()) return {false, diff};
  return {true, std::to_string(played.log.games.size()) + " game log(s) byte-identical"};
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent ranking competitions, preference data and metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PromptTemplates::builtin().version));

  Overrides o;
  std::string config_path;
  std::string out_dir, cache_dir, run_dir, mode;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool verbose = false;
  std::vector<std::string> metrics;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output root directory");
    sub->add_option("--cache-dir", cache_dir, "Response cache directory");
    sub->add_flag("--offline", o.offline, "Use built-in mock providers only");
    sub->add_option("--seed", seed, "Override the run seed");
    sub->add_option("--jobs", jobs, "Games or queries processed concurrently")
        ->check(CLI::Range(1, 64));
    sub->add_flag("-v,--verbose", verbose, "Debug logging");
  };

  auto* compete = app.add_subcommand("compete", "Play a competition");
  compete->add_option("--config", config_path, "Run config (TOML or JSON)")->required();
  add_common(compete);

  auto* datagen = app.add_subcommand("datagen", "Generate a preference dataset");
  datagen->add_option("--config", config_path, "Run config (TOML or JSON)")->required();
  datagen->add_option("--mode", mode, "sg or dg (default: datagen.mode)")
      ->check(CLI::IsMember({"sg", "dg"}));
  add_common(datagen);

  auto* eval = app.add_subcommand("eval", "Compute metrics over a finished run");
  eval->add_option("--run", run_dir, "Run directory")->required();
  eval->add_option("--metrics", metrics, "Metrics (default: eval.metrics)")->delimiter(',');
  add_common(eval);

  auto* replay = app.add_subcommand("replay", "Verify a run reproduces from its cache");
  replay->add_option("--run", run_dir, "Run directory")->required();
  add_common(replay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (verbose) log::set_min_level(log::Level::Debug);
  auto* active = app.get_subcommands().front();
  if (!out_dir.empty()) o.out = out_dir;
  if (!cache_dir.empty()) o.cache_dir = cache_dir;
  if (active->count("--seed") > 0) o.seed = seed;
  if (active->count("--jobs") > 0) o.jobs = jobs;

  try {
    if (active == compete) {
      auto config = load_run_config(config_path);
      apply_overrides(config, o);
      const auto result = cmd_compete(config);
      const auto summary = result.run_dir / "summary.txt";
      if (fs::exists(summary)) out << read_file(summary);
      out << "run: " << result.run_dir.string() << "\n";
      if (result.aborted > 0) {
        err << result.aborted << " game(s) aborted; see manifest.json\n";
        return kExitProvider;
      }
    } else if (active == datagen) {
      auto config = load_run_config(config_path);
      apply_overrides(config, o);
      const auto result = cmd_datagen(config, mode);
      out << "triplets: " << result.triplets << " (skipped " << result.skipped << ")\n"
          << "dataset: " << result.dataset_dir.string() << "\n";
    } else if (active == eval) {
      const auto dir = cmd_eval(run_dir, metrics, o);
      out << "eval: " << dir.string() << "\n";
    } else if (active == replay) {
      const auto report = cmd_replay(run_dir, o);
      out << (report.pass ? "PASS" : "FAIL") << ": " << report.detail << "\n";
      if (!report.pass) return kExitVerification;
    }
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rankarena::cli
