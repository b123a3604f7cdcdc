// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankarena/game.hpp"

namespace rankarena::cli {

inline constexpr int kSchemaVersion = 1;

struct ProviderSettings {
  std::string chat_url;  // empty: RANKARENA_CHAT_URL
  std::string embed_url;
  std::string nli_url;
  std::string nli_model = "nli";
  int max_inflight = 8;
  int timeout_s = 60;
  int max_retries = 3;
};

struct DatagenSettings {
  std::string mode = "sg";
  int samples = 5;
  double temperature = 0.8;
  std::string model;
  bool generate_initial = true;
  std::vector<int> round_select;
  std::string focal_agent;
};

struct EvalSettings {
  std::vector<std::string> metrics;
  std::string embed_model = "hashed-bow-256";
  int permutations = 10000;
};

struct RunConfig {
  int schema = kSchemaVersion;
  std::string name;
  std::filesystem::path topics;
  std::filesystem::path output_dir = "runs";
  std::filesystem::path cache_dir;  // empty: <output_dir>/cache
  int games = 0;                    // 0: every topic
  int jobs = 1;
  bool offline = false;
  CompetitionConfig competition;
  ProviderSettings providers;
  DatagenSettings datagen;
  EvalSettings eval;
};

/// Parses a TOML file, or JSON when the extension is .json. Relative paths
/// resolve against the file's directory. Unknown keys, wrong types and
/// invalid values raise ConfigError naming the key.
RunConfig load_run_config(const std::filesystem::path& path);

/// Same, from an already parsed document.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                               const std::string& source);

/// Fully resolved form (paths absolute, roster expanded); loads back through
/// run_config_from_json.
nlohmann::json to_json(const RunConfig& config);

/// Converts a TOML document to the equivalent JSON value.
nlohmann::json toml_to_json(std::string_view toml_text, const std::string& source);

}  // namespace rankarena::cli
