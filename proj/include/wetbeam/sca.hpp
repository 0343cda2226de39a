// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/architectures.hpp"
#include "wetbeam/conic.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/solution.hpp"

#include <vector>

namespace wetbeam {

/// Linearization data for one outer iteration.
struct SurrogateAnchors {
    std::vector<cvec> precoders;         ///< b~_q
    cvec analog;                         ///< phi~ or packed C~
    std::vector<cvec> channels;          ///< h_eff_k at the anchor
    std::vector<std::vector<cdouble>> z; ///< z[k][q] = h_eff_k^H b~_q
    std::vector<std::vector<double>> alpha;
    std::vector<std::vector<cvec>> nu;   ///< nu[k][q] = alpha z h_eff_k + b~_q / alpha
};

/// How the two factors of h_eff^H b are weighted inside the surrogate.
/// Literal uses alpha = 1. Balanced picks alpha^2 = |b~| / |z h_eff|, which
/// gives both factors the same norm at the anchor.
enum class SurrogateScaling { Literal, Balanced };

SurrogateAnchors make_anchors(const ArchitectureSpec& spec, const ChannelSet& channels,
                              const std::vector<cvec>& precoders, const cvec& analog,
                              SurrogateScaling scaling = SurrogateScaling::Balanced);

enum class Branch { Carrier, Peaking };

/// Relative tolerance on the back-off point used by select_hpa_branch.
inline constexpr double kKneeSlack = 1e-6;

/// Carrier iff g sum_q |b~_{q,n}|^2 <= (P_max / l^2)(1 + kKneeSlack).
/// Throws InfeasibleAnchorError above P_max.
std::vector<Branch> select_hpa_branch(const std::vector<cvec>& precoders, const DohertyParams& params);

/// Concave minorant of |h_eff^H b|^2 at an arbitrary point; `heff` is the
/// effective channel evaluated at the point's analog configuration.
/// Re{nu^H (a z h + b / a)} - |nu|^2 / 2 - |a z h - b / a|^2 / 2 - |z|^2 with a = alpha.
double surrogate_received_power(const cvec& heff, const cvec& b, cdouble z, const cvec& nu, double alpha = 1.0);

/// 2 Re{conj(z) h^H b} - |z|^2, the bound used when h does not depend on the analog variables.
double linearized_received_power(const cvec& h, const cvec& b, cdouble z);

/// g sum_q (2 Re{conj(b~_{q,n}) b_{q,n}} - |b~_{q,n}|^2).
double linearized_chain_power(const std::vector<cvec>& anchor, const std::vector<cvec>& point, int chain,
                              double gain);

struct ScaSettings {
    int max_iterations = 50;
    double tolerance = 1e-4;   ///< relative objective change
    rvec targets;              ///< P_k^th per device (W)
    double power_margin = 1e-7; ///< relative back-off on the P_max caps
    double monotone_slack = 1e-6;
    SurrogateScaling scaling = SurrogateScaling::Balanced;
    conic::Tolerances solver;

    void validate(int devices) const;
};

/// Sizes in the complex-counted convention: one unknown per complex entry.
struct SubproblemTally {
    int variables = 0;
    int constraints = 0;
};

/// The lowered convex subproblem plus the variable layout needed to read it back.
struct Subproblem {
    conic::ConicProblem problem;
    int streams = 0;
    int chains = 0;
    int precoder_offset = 0; ///< b_{q,n} at offset + 2 (q N + n), (re, im)
    int analog_offset = 0;   ///< x_j at offset + 2 j
    int analog_size = 0;
    int t_offset = 0;
    double t_scale = 1.0;    ///< t_n = t_scale * x[t_offset + n]
    SubproblemTally tally;
    std::vector<Branch> branches;
};

Subproblem assemble_subproblem(const ArchitectureSpec& spec, const SurrogateAnchors& anchors,
                               const ChannelSet& channels, const DohertyParams& doherty, const ScaSettings& settings);

/// Real decision vector of a subproblem for the given point (for constraint checks).
rvec pack_point(const Subproblem& sub, const std::vector<cvec>& precoders, const cvec& analog, const rvec& t);

/// Outer loop: anchor, assemble, solve, adopt, until the relative change
/// drops below the threshold. Throws SubproblemError on an infeasible step.
BeamformingSolution sca_optimize(const ArchitectureSpec& spec, const ChannelSet& channels,
                                 const BeamformingSolution& init, const DohertyParams& doherty,
                                 const ScaSettings& settings);

} // namespace wetbeam
