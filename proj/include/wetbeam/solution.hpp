// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace wetbeam {

enum class Architecture {
    Its,           ///< digital feeder + passive transmitting surface
    FullyDigital,  ///< one RF chain per antenna
    HybridFull,    ///< hybrid, fully-connected analog network
    HybridPartial, ///< hybrid, partially-connected (sub-array) network
};

std::string_view to_string(Architecture arch);
Architecture architecture_from_string(std::string_view name);

/// One SCA iteration as reported to the harness.
struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;      ///< sum of HPA consumptions after the step (W)
    double max_violation = 0.0;  ///< largest relative received-power shortfall
    std::vector<bool> peaking;   ///< branch flags used to build this step
};

/// Digital precoders plus the analog configuration of one architecture.
///
/// `analog` holds phi (length M) for the ITS, the column-major entries of C
/// (length M*N) for HybridFull, the stacked sub-array blocks (length N*L) for
/// HybridPartial, and is empty for FullyDigital.
struct BeamformingSolution {
    Architecture architecture = Architecture::Its;
    std::vector<cvec> precoders;
    cvec analog;
    rvec chain_powers;
    rvec received_powers;
    std::vector<double> objective_trace;
    std::vector<IterationRecord> iterations;
    bool converged = false;
    bool monotone = true;

    int streams() const { return static_cast<int>(precoders.size()); }
};

} // namespace wetbeam
