// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/solution.hpp"
#include "wetbeam/types.hpp"

#include <span>

namespace wetbeam {

/// Symmetric l-way Doherty amplifier: one carrier and l - 1 peaking stages.
struct DohertyParams {
    int ways = 2;                  ///< l
    double peak_efficiency = 0.25; ///< eta_max
    double max_output = 300.0;     ///< P_max (W)
    double gain = 100.0;           ///< g

    void validate() const;
    /// P_max / l^2, the back-off peak where the peaking stages switch on.
    double backoff() const { return max_output / (static_cast<double>(ways) * ways); }
};

struct StaticPower {
    double baseband = 0.2;    ///< P_bb (W)
    double transceiver = 0.1; ///< P_tc (W)
};

struct ItsPowerParams {
    double control = 1.0;    ///< P_ctrl (W)
    double per_cell = 1e-3;  ///< P_cell (W per element)
};

enum class HybridKind { FullyConnected, PartiallyConnected };

struct InsertionLoss {
    double splitter_db = 0.5;
    double combiner_db = 0.5;
    double shifter_db = 3.5;
    double total_db = 0.0;
    double factor = 1.0; ///< linear gamma >= 1
};

/// Everything the power accounting needs, shared by all architectures.
struct PowerModel {
    DohertyParams doherty;
    StaticPower statics;
    ItsPowerParams its;
    double its_efficiency = 0.45; ///< rho_its
    double splitter_db = 0.5;
    double combiner_db = 0.5;
    double shifter_db = 3.5;
};

/// g * sum_q |b_{q,n}|^2 for chain n (zero based).
double hpa_output_power(std::span<const cvec> precoders, int chain, double gain);

/// Output power of every chain.
rvec chain_output_powers(std::span<const cvec> precoders, double gain);

/// Piecewise Doherty consumption; 0 W at zero output.
/// Throws SaturationError above P_max and ParameterError below zero.
double doherty_consumption(double output, const DohertyParams& params);

/// output / consumption. Throws UndefinedEfficiencyError at zero output.
double drain_efficiency(double output, const DohertyParams& params);

/// Stage counts accumulate in dB: HBFC ceil(log2 M) gs + ceil(log2 N) gc + gp,
/// HBPC ceil(log2 floor(M/N)) gs + gp.
InsertionLoss insertion_loss(HybridKind kind, int elements, int chains, double splitter_db, double combiner_db,
                             double shifter_db);

/// Total consumption of the power beacon, static terms included.
/// `elements` is M (ITS elements or transmit antennas).
double total_power(const BeamformingSolution& solution, const PowerModel& model, int elements);

/// Sum of HPA consumptions only (the optimization objective).
double hpa_power(const rvec& chain_powers, const DohertyParams& params);

} // namespace wetbeam
