// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/harness/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wetbeam::harness {

/// Column order of results.csv.
inline const std::vector<std::string> kResultColumns = {
    "experiment",      "architecture",         "sweep_value",    "realization", "seed",
    "total_power_W",   "total_power_dBW",      "min_received_power_W",          "iterations",
    "wall_ms"};

/// Run metadata recorded in the manifest.
struct RunInfo {
    std::string command;
    std::string started; ///< ISO 8601 UTC
    std::string finished;
    double scale = 1.0;
};

/// ISO 8601 UTC timestamp of the current time.
std::string utc_timestamp();

/// Writes results.csv, aggregates.csv, traces.csv, received.csv,
/// failures.csv, starts.csv and map CSVs (when present) plus manifest.json
/// into `dir`. Returns the file names written. Throws OutputError when the
/// directory or a file cannot be written.
std::vector<std::string> write_results(const ResultSet& results, const std::filesystem::path& dir,
                                       const RunInfo& info);

/// Version string baked in at build time.
std::string code_version();

} // namespace wetbeam::harness
