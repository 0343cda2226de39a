// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/harness/config.hpp"
#include "wetbeam/solution.hpp"
#include "wetbeam/types.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wetbeam::harness {

/// Results could not be persisted.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One solved (architecture, sweep point, realization) cell.
struct ResultRecord {
    std::string experiment;
    Architecture architecture = Architecture::Its;
    double sweep_value = 0.0; ///< axis value; start index for convergence runs
    int realization = 0;
    std::uint64_t seed = 0;
    double total_power_W = 0.0;
    double total_power_dBW = 0.0;
    rvec received_power;
    double min_received_power_W = 0.0;
    int iterations = 0;
    std::vector<double> trace; ///< HPA objective per SCA iteration, start first
    double wall_ms = 0.0;
};

struct FailureRecord {
    std::string experiment;
    Architecture architecture = Architecture::Its;
    double sweep_value = 0.0;
    int realization = 0;
    std::uint64_t seed = 0;
    std::string message;
};

/// Mean and sample standard deviation over the successful realizations of one cell.
struct Aggregate {
    std::string experiment;
    Architecture architecture = Architecture::Its;
    double sweep_value = 0.0;
    int count = 0;
    int failures = 0;
    double mean_W = 0.0;
    double std_W = 0.0;
    double mean_dBW = 0.0; ///< 10 log10(mean_W)
    double mean_iterations = 0.0;
};

/// A chain-assignment start of the convergence experiment.
struct StartRecord {
    int realization = 0;
    int index = 0;
    std::vector<int> assignment;
    bool feasible = false;
    double init_score = 0.0;
    bool chosen = false; ///< picked by the permutation search
};

/// Received power over a plane, divided by the largest value of the same plane
/// type across every map of the run.
struct PowerMap {
    std::string plane; ///< "its" or "device"
    double sweep_value = 0.0;
    int realization = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> power;
};

struct ResultSet {
    ExperimentConfig config;
    std::vector<ResultRecord> records;
    std::vector<FailureRecord> failures;
    std::vector<Aggregate> aggregates;
    std::vector<StartRecord> starts;
    std::vector<PowerMap> maps;
    /// Cells where more than 20% of realizations failed.
    std::vector<std::string> failed_cells;
    bool failed() const { return !failed_cells.empty(); }
};

/// Fraction of failed realizations above which a cell fails the experiment.
inline constexpr double kMaxFailureFraction = 0.2;

/// Runs the experiment described by `config` on `config.workers` threads.
/// Per-realization errors are recorded in `failures`; the result set is
/// identical for every worker count.
ResultSet run_experiment(const ExperimentConfig& config);

/// Groups records and failures by (architecture, sweep value) in first-seen order.
std::vector<Aggregate> aggregate(const std::vector<ResultRecord>& records,
                                 const std::vector<FailureRecord>& failures);

/// Area (m^2) of the grid cells within `drop_db` of the map's own maximum,
/// each cell counting for the product of the grid spacings.
double focal_spot_area(const PowerMap& map, double drop_db = 3.0);

/// Runs `task(i)` for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

} // namespace wetbeam::harness
