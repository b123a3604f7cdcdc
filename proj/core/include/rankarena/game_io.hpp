// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rankarena/game.hpp"

namespace rankarena {

/// File-system safe form of a query id: [A-Za-z0-9._-] kept, anything else
/// replaced by '_' plus a short hash suffix so distinct ids stay distinct.
std::string sanitize_file_stem(std::string_view id);

nlohmann::json to_json(const RoundState& state);
RoundState round_state_from_json(const nlohmann::json& j);

struct LogWriteOptions {
  std::string ranker_description;
  std::string templates_version;
};

/// Writes `<dir>/games/<query>.jsonl` (one line per round, round 0 first) and
/// `<dir>/manifest.json`. Output is deterministic: no timestamps, sorted keys.
void write_competition(const std::filesystem::path& dir, const CompetitionLog& log,
                       const LogWriteOptions& options = {});

/// Inverse of write_competition. Corrupt lines raise ParseError naming
/// file and line.
CompetitionLog read_competition(const std::filesystem::path& dir);

}  // namespace rankarena
