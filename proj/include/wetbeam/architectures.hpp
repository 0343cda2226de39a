// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/channel.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/solution.hpp"
#include "wetbeam/types.hpp"

#include <utility>
#include <vector>

namespace wetbeam {

enum class AnalogKind {
    None,          ///< fully digital
    Phases,        ///< ITS phase vector phi
    FullMatrix,    ///< HBFC, M x N
    BlockDiagonal, ///< HBPC, N blocks of L
};

/// Hardware inventory of one beacon design.
struct ComponentCounts {
    int hpas = 0;
    int dividers = 0;
    int phase_shifters = 0;
    int combiners = 0;
};

struct ArchitectureSpec {
    Architecture tag = Architecture::Its;
    AnalogKind analog = AnalogKind::Phases;
    int elements = 0;           ///< M
    int chains = 0;             ///< N, or M for FD
    int block = 0;              ///< L for HBPC
    double modulus = 1.0;       ///< bound on analog entries: 1, or Delta
    double loss_factor = 1.0;   ///< rho_its, 1, or 1 / gamma
    double insertion_db = 0.0;  ///< hybrids only
    bool its_static = false;    ///< P_ctrl + M P_cell included
    ComponentCounts counts;

    /// Length of BeamformingSolution::analog.
    int analog_size() const;
};

/// Throws UnsupportedConfigurationError when M < N.
ArchitectureSpec make_architecture(Architecture tag, int elements, int chains, const PowerModel& model);

/// M, except HBPC which drives N floor(M / N) antennas.
int effective_antenna_count(Architecture tag, int elements, int chains);

/// M x N analog matrix of a hybrid design from its packed entries.
cmat analog_matrix(const ArchitectureSpec& spec, const cvec& analog);

/// Effective channel of device k as an affine function of the conjugated
/// analog entries: h_eff(n) = constant(n) + sum coeff * conj(analog[j]).
struct EffectiveChannelMap {
    std::vector<std::vector<std::pair<int, cdouble>>> terms; ///< per chain
    cvec constant;

    cvec evaluate(const cvec& analog) const;
};

EffectiveChannelMap effective_channel_map(const ArchitectureSpec& spec, const ChannelSet& channels, int device);

/// h_eff for every device at the given analog configuration.
std::vector<cvec> effective_channels(const ArchitectureSpec& spec, const ChannelSet& channels, const cvec& analog);

/// Received RF power per device (W): g * loss_factor * sum_q |h_eff^H b_q|^2.
rvec received_power(const ArchitectureSpec& spec, const BeamformingSolution& solution, const ChannelSet& channels,
                    double gain);

} // namespace wetbeam
