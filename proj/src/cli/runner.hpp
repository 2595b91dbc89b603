#pragma once

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace heatbv::cli {

/// Exit codes of the runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;    // config / resolution / io failures
inline constexpr int kExitVerdict = 2;  // experiment ran, verdict failed

/// Run one experiment: writes samples.csv, verdict.json and curve.svg into
/// the configured output directory. Returns kExitOk iff all verdicts pass.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Summarize every verdict.json under `dir` (the directory itself and its
/// immediate subdirectories): one row per scenario, sorted by scenario name.
/// Returns kExitOk iff all rows pass; an empty directory is a pass.
int report_directory(const std::string& dir, std::ostream& out);

}  // namespace heatbv::cli
