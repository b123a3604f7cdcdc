// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rankarena/corpus.hpp"
#include "rankarena/game.hpp"

namespace rankarena::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rankarena-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline Topic make_topic(std::string id, std::string query, std::string seed) {
  Topic t;
  t.query = Query{id, std::move(query)};
  t.seed = SeedDocument{std::move(id), seed, word_count(seed)};
  return t;
}

/// n synthetic topics with distinct queries and a shared-style seed text.
inline std::vector<Topic> synthetic_topics(int n) {
  static const char* subjects[] = {"garden", "battery", "river", "violin", "bridge",
                                   "harvest", "engine", "museum", "forest", "comet"};
  std::vector<Topic> out;
  for (int i = 0; i < n; ++i) {
    const std::string a = subjects[i % 10];
    const std::string b = subjects[(i / 10 + 3) % 10];
    const std::string id = "t" + std::to_string(1000 + i);
    out.push_back(make_topic(id, a + " " + b + " care",
                             "A short note about the " + a + " and the " + b +
                                 ". It covers basic upkeep and common questions. Readers "
                                 "learn what to check first and when to ask for help."));
  }
  return out;
}

inline AgentSpec scripted(std::string id, Strategy s) {
  AgentSpec a;
  a.id = std::move(id);
  a.kind = AgentKind::Scripted;
  a.strategy = s;
  return a;
}

inline AgentSpec llm(std::string id, std::string model, double temperature = 0.0) {
  AgentSpec a;
  a.id = std::move(id);
  a.kind = AgentKind::Llm;
  a.model = std::move(model);
  a.temperature = temperature;
  return a;
}

}  // namespace rankarena::testing
