// SPDX-License-Identifier: Apache-2.0
#include "rankarena/game_io.hpp"

#include <fstream>
#include <sstream>

#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"

namespace rankarena {
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string sanitize_file_stem(std::string_view id) {
  std::string out;
  bool changed = id.empty();
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
    changed |= !ok;
  }
  if (out.empty() || out.front() == '.') {
    out.insert(out.begin(), '_');
    changed = true;
  }
  if (changed) out += "-" + sha256_hex(id).substr(0, 8);
  return out;
}

nlohmann::json to_json(const RoundState& state) {
  nlohmann::json docs = nlohmann::json::object();
  for (const auto& [agent, d] : state.documents) {
    docs[agent] = {{"text", d.text},
                   {"word_count", d.word_count},
                   {"prompt", d.prompt},
                   {"truncated", d.truncated},
                   {"kept_previous", d.kept_previous},
                   {"failed", d.failed}};
  }
  nlohmann::json ranking = nlohmann::json::array();
  for (std::size_t i = 0; i < state.ranking.entries.size(); ++i) {
    const auto& e = state.ranking.entries[i];
    ranking.push_back(
        {{"rank", i + 1}, {"agent_id", e.agent_id}, {"doc_id", e.doc_id}, {"score", e.score}});
  }
  return {{"round", state.round}, {"documents", docs}, {"ranking", ranking}};
}

RoundState round_state_from_json(const nlohmann::json& j) {
  RoundState s;
  s.round = j.at("round").get<int>();
  for (const auto& [agent, d] : j.at("documents").items()) {
    Document doc;
    doc.agent_id = agent;
    doc.round = s.round;
    doc.text = d.at("text").get<std::string>();
    doc.word_count = d.at("word_count").get<std::size_t>();
    doc.prompt = d.value("prompt", std::string{});
    doc.truncated = d.value("truncated", false);
    doc.kept_previous = d.value("kept_previous", false);
    doc.failed = d.value("failed", false);
    s.documents.emplace(agent, std::move(doc));
  }
  s.ranking.round = s.round;
  int expected = 1;
  for (const auto& e : j.at("ranking")) {
    if (e.at("rank").get<int>() != expected++) {
      throw ParseError("ranking entries out of order in round " + std::to_string(s.round));
    }
    s.ranking.entries.push_back(ScoredDoc{e.at("doc_id").get<std::string>(),
                                          e.at("agent_id").get<std::string>(),
                                          e.at("score").get<double>()});
  }
  return s;
}

void write_competition(const fs::path& dir, const CompetitionLog& log,
                       const LogWriteOptions& options) {
  fs::create_directories(dir / "games");
  nlohmann::json games = nlohmann::json::array();
  for (const auto& g : log.games) {
    const auto file = "games/" + sanitize_file_stem(g.query.id) + ".jsonl";
    std::string body = to_json(g.initial).dump() + "\n";
    for (const auto& r : g.rounds) body += to_json(r).dump() + "\n";
    write_file(dir / file, body);
    games.push_back({{"query_id", g.query.id},
                     {"query", g.query.text},
                     {"seed_doc", g.seed_doc.text},
                     {"status", std::string(to_string(g.status))},
                     {"error", g.error},
                     {"rounds_played", g.rounds.size()},
                     {"file", file}});
  }
  nlohmann::json manifest{{"fingerprint", log.fingerprint},
                          {"config", log.config},
                          {"games", games},
                          {"ranker", options.ranker_description},
                          {"templates_version", options.templates_version}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

CompetitionLog read_competition(const fs::path& dir) {
  const auto manifest = read_json_file(dir / "manifest.json");
  CompetitionLog log;
  try {
    log.fingerprint = manifest.at("fingerprint").get<std::string>();
    log.config = manifest.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((dir / "manifest.json").string() + ": " + e.what());
  }
  for (const auto& g : manifest.at("games")) {
    GameLog game;
    game.query = Query{g.at("query_id").get<std::string>(), g.at("query").get<std::string>()};
    const auto seed = g.at("seed_doc").get<std::string>();
    game.seed_doc = SeedDocument{game.query.id, seed, word_count(seed)};
    game.fingerprint = log.fingerprint;
    game.status = g.at("status").get<std::string>() == "aborted" ? GameStatus::Aborted
                                                                  : GameStatus::Complete;
    game.error = g.value("error", std::string{});
    const auto path = dir / g.at("file").get<std::string>();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      RoundState state;
      try {
        state = round_state_from_json(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      state.ranking.query_id = game.query.id;
      const int expected = first ? 0 : static_cast<int>(game.rounds.size()) + 1;
      if (state.round != expected) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected round " +
                         std::to_string(expected) + ", found " + std::to_string(state.round));
      }
      if (first) {
        game.initial = std::move(state);
        first = false;
      } else {
        game.rounds.push_back(std::move(state));
      }
    }
    if (first) throw ParseError(path.string() + ": no rounds");
    log.games.push_back(std::move(game));
  }
  return log;
}

}  // namespace rankarena
