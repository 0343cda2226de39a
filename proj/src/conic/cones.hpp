// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cone arithmetic for the interior point solver. Vectors live in the
// stacked cone space of a ConicProblem.

#include "wetbeam/conic.hpp"

#include <vector>

namespace wetbeam::conic::detail {

struct Block {
    ConeKind kind;
    int offset;
    int dim;
    int side;
};

std::vector<Block> make_blocks(const std::vector<Cone>& cones);
/// Orthant dimension + number of second-order cones + sum of PSD sides.
int degree(const std::vector<Block>& blocks);

/// Nesterov-Todd scaling of one block.
struct BlockScaling {
    rvec d;          ///< orthant: sqrt(s / z)
    double beta = 1; ///< second-order
    rvec w;          ///< second-order: normalized scaling point
    rmat R;          ///< PSD: W(u) = R^T U R
    rmat rti;        ///< PSD: R^{-T}
    rvec lam;        ///< PSD: eigenvalues of the scaled point
};

struct Scaling {
    std::vector<BlockScaling> blocks;
    rvec lambda; ///< W z = W^{-T} s
};

/// False when s or z is not strictly interior.
bool nt_scaling(const std::vector<Block>& blocks, const rvec& s, const rvec& z, Scaling& out);

enum class Apply { W, WInv, WT, WInvT };
rvec apply_scaling(const std::vector<Block>& blocks, const Scaling& sc, const rvec& u, Apply op);

/// Identity element.
rvec identity(const std::vector<Block>& blocks, int rows);
/// Jordan product x o y.
rvec jordan_product(const std::vector<Block>& blocks, const rvec& x, const rvec& y);
/// u with lambda o u = v, lambda taken from the scaling.
rvec jordan_divide(const std::vector<Block>& blocks, const Scaling& sc, const rvec& v);
/// Smallest t with x + t e in the cone (negative when x is interior).
double max_shift(const std::vector<Block>& blocks, const rvec& x);
/// Largest a with lambda + a d in the cone (infinity if unbounded).
double max_step(const std::vector<Block>& blocks, const Scaling& sc, const rvec& d);

} // namespace wetbeam::conic::detail
