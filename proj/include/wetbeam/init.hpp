// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/architectures.hpp"
#include "wetbeam/conic.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/solution.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wetbeam {

enum class ClusterRule { Strongest, Weakest };

ClusterRule cluster_rule_from_string(const std::string& name);

/// Element sets M_n, one per feeder antenna. Ties go to the smallest antenna index.
std::vector<std::vector<int>> cluster_its_elements(const cmat& A, ClusterRule rule = ClusterRule::Strongest);

/// N_k per device. Throws UnsupportedConfigurationError when N < K.
std::vector<int> allocate_rf_chains(const std::vector<cvec>& H, int chains);

/// rho_k = N_k^2 + sum_{k' != k} N_k'.
double allocation_weight(const std::vector<int>& counts, int device);

/// N! / prod N_k!, or -1 past `cap`.
long long assignment_count(const std::vector<int>& counts, long long cap);

/// Every distinct chain -> device arrangement in lexicographic order.
/// Throws CombinatorialBlowupError when the count exceeds `cap`.
std::vector<std::vector<int>> enumerate_assignments(const std::vector<int>& counts, long long cap = 100000);

/// angle(phi_m) = angle(h_{k,m}) - angle(a_{n,m}) for m in M_n and k = assignment[n].
cvec init_phases(const std::vector<std::vector<int>>& partition, const std::vector<int>& assignment, const cmat& A,
                 const std::vector<cvec>& H);

struct MinMaxPowerResult {
    std::vector<cvec> precoders; ///< sqrt(lambda_q) u_q, strongest first
    cmat B;                      ///< optimal covariance
    double t = 0.0;              ///< optimal max output power (W)
    rvec eigenvalues;            ///< all eigenvalues of B, descending
    conic::ConicSolution solver;
};

/// minimize t s.t. g B_nn <= t, g tr(h_k h_k^H B) >= targets_k, B PSD.
/// Solved through its dual LMI; B is read from the PSD multiplier.
/// Throws InitializationError when infeasible, InfeasibleAnchorError past P_max.
MinMaxPowerResult min_max_power_precoders(const std::vector<cvec>& heff, const rvec& targets,
                                          const DohertyParams& doherty, const conic::Tolerances& tol = {});

struct InitSettings {
    ClusterRule cluster_rule = ClusterRule::Strongest;
    long long permutation_cap = 100000;
    int workers = 1;
    conic::Tolerances solver;
};

struct AssignmentDiagnostic {
    std::vector<int> assignment;
    bool feasible = false;
    double score = 0.0; ///< sum of HPA consumptions (W)
    std::string message;
};

struct InitialPoint {
    BeamformingSolution solution;
    double score = 0.0;
    std::vector<int> counts;
    std::vector<int> assignment;
    std::vector<std::vector<int>> partition;
    std::vector<AssignmentDiagnostic> diagnostics;
};

/// One chain -> device arrangement of the ITS start (used by init_its and for
/// per-permutation SCA starts). Throws on infeasibility.
InitialPoint evaluate_assignment(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                                 const DohertyParams& doherty, const std::vector<std::vector<int>>& partition,
                                 const std::vector<int>& assignment, const conic::Tolerances& tol = {});

/// Chain allocation, permutation search and the min-max power SDP for the ITS.
InitialPoint init_its(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                      const DohertyParams& doherty, const InitSettings& settings = {});

/// Phase-aligned analog columns followed by the min-max power SDP (HBFC and HBPC).
InitialPoint init_hybrid(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                         const DohertyParams& doherty, const InitSettings& settings = {});

/// Min-max power SDP over the M antennas.
InitialPoint init_fully_digital(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                                const DohertyParams& doherty, const InitSettings& settings = {});

/// Dispatches on the architecture tag.
InitialPoint initialize(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                        const DohertyParams& doherty, const InitSettings& settings = {});

/// Uniformly random ITS phases followed by the min-max power SDP.
InitialPoint init_its_random(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                             const DohertyParams& doherty, std::uint64_t seed, const conic::Tolerances& tol = {});

} // namespace wetbeam
