// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankarena/error.hpp"
#include "rankarena/game.hpp"
#include "run_config.hpp"

namespace rankarena::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitProvider = 3,
  kExitVerification = 4,
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

struct CompeteResult {
  std::filesystem::path run_dir;
  CompetitionLog log;
  std::size_t aborted = 0;
};

/// Plays the configured competition into <out>/<fingerprint>/.
CompeteResult cmd_compete(const RunConfig& config);

struct DatagenResult {
  std::filesystem::path dataset_dir;
  std::size_t triplets = 0;
  std::size_t skipped = 0;
};

/// mode is "sg" or "dg"; empty uses the config's datagen.mode.
DatagenResult cmd_datagen(const RunConfig& config, std::string mode = {});

/// Writes <run>/eval/<metric>.json and per-agent CSV series. `metrics`
/// empty falls back to the run's eval.metrics; both empty is an error.
std::filesystem::path cmd_eval(const std::filesystem::path& run_dir,
                               std::vector<std::string> metrics, const Overrides& overrides = {});

struct ReplayReport {
  bool pass = false;
  std::string detail;
};

/// Re-runs a finished run against its cache with the network disabled and
/// compares the regenerated logs byte for byte.
ReplayReport cmd_replay(const std::filesystem::path& run_dir, const Overrides& overrides = {});

/// Metrics cmd_eval understands.
const std::vector<std::string>& known_metrics();

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rankarena::cli
