// SPDX-License-Identifier: Apache-2.0
#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "rankarena/error.hpp"

namespace rankarena::cli {
namespace fs = std::filesystem;

namespace {

nlohmann::json convert(const toml::node& node, const std::string& where) {
  if (const auto* t = node.as_table()) {
    auto obj = nlohmann::json::object();
    for (auto&& [k, v] : *t) {
      const std::string key(k.str());
      obj[key] = convert(v, where.empty() ? key : where + "." + key);
    }
    return obj;
  }
  if (const auto* a = node.as_array()) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < a->size(); ++i) {
      arr.push_back(convert(*a->get(i), where + "[" + std::to_string(i) + "]"));
    }
    return arr;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  throw ConfigError(where + ": date/time values are not supported");
}

/// Typed, strict view over one JSON object of the config.
class Section {
 public:
  Section(const nlohmann::json& obj, std::string path, const std::string& source)
      : obj_(obj), path_(std::move(path)), source_(source) {
    if (!obj_.is_object()) fail("", "expected a table");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ConfigError(source_ + ": " + (where.empty() ? "" : where + ": ") + msg);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string str(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::string required_str(const std::string& key) {
    if (!has(key)) fail(key, "required key missing");
    return str(key, {});
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  int small_int(const std::string& key, int fallback, int lo, int hi) {
    const auto v = integer(key, fallback);
    if (v < lo || v > hi) {
      fail(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                    std::to_string(v));
    }
    return static_cast<int>(v);
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const std::string& key) {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const auto& v = obj_.at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    for (const auto& e : v) {
      if (!e.is_string()) fail(key, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::vector<int> ints(const std::string& key) {
    std::vector<int> out;
    if (!has(key)) return out;
    const auto& v = obj_.at(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  std::optional<Section> sub(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(obj_.at(key), path_.empty() ? key : path_ + "." + key, source_);
  }

  /// Rejects keys that were never looked up.
  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.contains(k)) fail(k, "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const nlohmann::json& obj_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : fs::weakly_canonical(base / path);
}

template <typename Fn>
auto wrap(Section& s, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    s.fail(key, e.what());
  }
}

std::vector<AgentSpec> parse_roster(const nlohmann::json& agents, const std::string& source) {
  if (!agents.is_array() || agents.empty()) {
    throw ConfigError(source + ": agents: expected a non-empty array of tables");
  }
  std::vector<AgentSpec> roster;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Section a(agents[i], "agents[" + std::to_string(i) + "]", source);
    AgentSpec spec;
    const auto id = a.required_str("id");
    const auto kind = a.str("kind", "llm");
    if (kind == "llm") {
      spec.kind = AgentKind::Llm;
      spec.model = a.required_str("model");
      spec.endpoint = a.str("endpoint", {});
      spec.temperature = a.real("temperature", 0.0);
      if (spec.temperature < 0.0) a.fail("temperature", "must be non-negative");
    } else if (kind == "scripted") {
      spec.kind = AgentKind::Scripted;
      const auto strategy = a.str("strategy", "noop");
      spec.strategy = wrap(a, "strategy", [&] { return strategy_from_string(strategy); });
    } else {
      a.fail("kind", "expected 'llm' or 'scripted', got '" + kind + "'");
    }
    const int count = a.small_int("count", 1, 1, 64);
    a.finish();
    if (count == 1) {
      spec.id = id;
      roster.push_back(spec);
    } else {
      for (int c = 1; c <= count; ++c) {
        spec.id = id + "-" + std::to_string(c);
        roster.push_back(spec);
      }
    }
  }
  return roster;
}

}  // namespace

nlohmann::json toml_to_json(std::string_view toml_text, const std::string& source) {
  try {
    auto table = toml::parse(toml_text, source);
    return convert(table, "");
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw ConfigError(source + ":" + std::to_string(where.line) + ":" +
                      std::to_string(where.column) + ": " + std::string(e.description()));
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto source = path.string();
  nlohmann::json doc;
  if (path.extension() == ".json") {
    try {
      doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(source + ": " + e.what());
    }
  } else {
    doc = toml_to_json(buf.str(), source);
  }
  return run_config_from_json(doc, fs::absolute(path).parent_path(), source);
}

RunConfig run_config_from_json(const nlohmann::json& doc, const fs::path& base_dir,
                               const std::string& source) {
  Section root(doc, "", source);
  RunConfig cfg;
  cfg.schema = root.small_int("schema", 0, 0, 1000);
  if (cfg.schema != kSchemaVersion) {
    root.fail("schema", "unsupported schema version " + std::to_string(cfg.schema) +
                            " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  cfg.name = root.str("name", {});
  cfg.topics = resolve(base_dir, root.required_str("topics"));
  cfg.output_dir = resolve(base_dir, root.str("output_dir", "runs"));
  cfg.cache_dir = resolve(base_dir, root.str("cache_dir", {}));
  cfg.games = root.small_int("games", 0, 0, 1'000'000);
  cfg.jobs = root.small_int("jobs", 1, 1, 64);
  cfg.offline = root.boolean("offline", false);

  auto& comp = cfg.competition;
  if (auto s = root.sub("competition")) {
    comp.rounds = s->small_int("rounds", comp.rounds, 1, 100'000);
    const auto prompt = s->str("prompt", "lsw");
    comp.prompt_kind = wrap(*s, "prompt", [&] { return prompt_kind_from_string(prompt); });
    const auto ties = s->str("tie_policy", "deterministic");
    comp.tie_policy = wrap(*s, "tie_policy", [&] { return tie_policy_from_string(ties); });
    const auto seed = s->integer("seed", 0);
    if (seed < 0) s->fail("seed", "must be non-negative");
    comp.seed = static_cast<std::uint64_t>(seed);
    comp.word_max = s->small_int("word_max", comp.word_max, 1, 100'000);
    comp.word_target = s->small_int("word_target", comp.word_target, 1, 100'000);
    comp.max_consecutive_failures =
        s->small_int("max_consecutive_failures", comp.max_consecutive_failures, 1, 1000);
    s->finish();
  }

  if (auto s = root.sub("ranker")) {
    auto& r = comp.ranker;
    const auto kind = s->str("kind", "bm25");
    r.kind = wrap(*s, "kind", [&] { return ranker_kind_from_string(kind); });
    r.bm25.k1 = s->real("k1", r.bm25.k1);
    r.bm25.b = s->real("b", r.bm25.b);
    r.corpus_path = resolve(base_dir, s->str("corpus", {})).string();
    r.embed_model = s->str("embed_model", {});
    r.constant = s->real("value", 0.0);
    if (r.kind == RankerSpec::Kind::Dense && r.embed_model.empty()) {
      s->fail("embed_model", "required for the dense ranker");
    }
    if (r.bm25.k1 < 0.0) s->fail("k1", "must be non-negative");
    if (r.bm25.b < 0.0 || r.bm25.b > 1.0) s->fail("b", "must be in [0, 1]");
    s->finish();
  }

  if (!root.has("agents")) root.fail("agents", "required key missing");
  comp.roster = parse_roster(root.raw("agents"), source);

  if (auto s = root.sub("providers")) {
    auto& p = cfg.providers;
    p.chat_url = s->str("chat_url", {});
    p.embed_url = s->str("embed_url", {});
    p.nli_url = s->str("nli_url", {});
    p.nli_model = s->str("nli_model", p.nli_model);
    p.max_inflight = s->small_int("max_inflight", p.max_inflight, 1, 4096);
    p.timeout_s = s->small_int("timeout_s", p.timeout_s, 1, 3600);
    p.max_retries = s->small_int("max_retries", p.max_retries, 0, 100);
    s->finish();
  }

  if (auto s = root.sub("datagen")) {
    auto& d = cfg.datagen;
    d.mode = s->str("mode", d.mode);
    if (d.mode != "sg" && d.mode != "dg") s->fail("mode", "expected 'sg' or 'dg'");
    d.samples = s->small_int("samples", d.samples, 2, 10'000);
    d.temperature = s->real("temperature", d.temperature);
    if (d.temperature < 0.0) s->fail("temperature", "must be non-negative");
    d.model = s->str("model", {});
    d.generate_initial = s->boolean("generate_initial", d.generate_initial);
    d.round_select = s->ints("round_select");
    d.focal_agent = s->str("focal_agent", {});
    s->finish();
  }

  if (auto s = root.sub("eval")) {
    auto& e = cfg.eval;
    e.metrics = s->strings("metrics");
    e.embed_model = s->str("embed_model", e.embed_model);
    e.permutations = s->small_int("permutations", e.permutations, 1, 100'000'000);
    s->finish();
  }
  root.finish();

  try {
    comp.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : c.competition.roster) {
    nlohmann::json j{{"id", a.id}};
    if (a.kind == AgentKind::Llm) {
      j["kind"] = "llm";
      j["model"] = a.model;
      j["endpoint"] = a.endpoint;
      j["temperature"] = a.temperature;
    } else {
      j["kind"] = "scripted";
      j["strategy"] = std::string(to_string(a.strategy));
    }
    agents.push_back(j);
  }
  const auto& comp = c.competition;
  const auto& r = comp.ranker;
  return {
      {"schema", c.schema},
      {"name", c.name},
      {"topics", c.topics.string()},
      {"output_dir", c.output_dir.string()},
      {"cache_dir", c.cache_dir.string()},
      {"games", c.games},
      {"jobs", c.jobs},
      {"offline", c.offline},
      {"competition",
       {{"rounds", comp.rounds},
        {"prompt", std::string(to_string(comp.prompt_kind))},
        {"tie_policy", std::string(to_string(comp.tie_policy))},
        {"seed", comp.seed},
        {"word_max", comp.word_max},
        {"word_target", comp.word_target},
        {"max_consecutive_failures", comp.max_consecutive_failures}}},
      {"ranker",
       {{"kind", std::string(to_string(r.kind))},
        {"k1", r.bm25.k1},
        {"b", r.bm25.b},
        {"corpus", r.corpus_path},
        {"embed_model", r.embed_model},
        {"value", r.constant}}},
      {"agents", agents},
      {"providers",
       {{"chat_url", c.providers.chat_url},
        {"embed_url", c.providers.embed_url},
        {"nli_url", c.providers.nli_url},
        {"nli_model", c.providers.nli_model},
        {"max_inflight", c.providers.max_inflight},
        {"timeout_s", c.providers.timeout_s},
        {"max_retries", c.providers.max_retries}}},
      {"datagen",
       {{"mode", c.datagen.mode},
        {"samples", c.datagen.samples},
        {"temperature", c.datagen.temperature},
        {"model", c.datagen.model},
        {"generate_initial", c.datagen.generate_initial},
        {"round_select", c.datagen.round_select},
        {"focal_agent", c.datagen.focal_agent}}},
      {"eval",
       {{"metrics", c.eval.metrics},
        {"embed_model", c.eval.embed_model},
        {"permutations", c.eval.permutations}}},
  };
}

}  // namespace rankarena::cli
