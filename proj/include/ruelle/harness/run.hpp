#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruelle/harness/config.hpp"
#include "ruelle/stats/report.hpp"

namespace ruelle::harness {

enum ExitCode : int { kPass = 0, kAcceptanceFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct RunOutcome {
  int exit_code = kPass;
  std::vector<stats::StatReport> reports;
  std::vector<std::string> artifacts;  ///< file names inside the output directory
  std::map<std::string, double> timings;
  std::string error;
};

/// Runs the selected subcommands and writes *.csv, report.json,
/// config.yaml and manifest.json into config.output. Numerical failures stop
/// the run with exit code 3; everything produced so far is kept.
RunOutcome run(const ExperimentConfig& config);

/// report.json record (no runtimes, so that it is byte-identical across
/// thread counts).
nlohmann::ordered_json to_json(const stats::StatReport& r);

}  // namespace ruelle::harness
