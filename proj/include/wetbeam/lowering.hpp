// SPDX-License-Identifier: Apache-2.0
#pragma once

// Complex-to-real lowering used by every conic model in the library.
//
// A complex vector x of length n is stored as the real vector
// [Re x_0, Im x_0, Re x_1, Im x_1, ...] (interleaved). A Hermitian matrix H
// of side n becomes the real symmetric matrix [[Re H, -Im H], [Im H, Re H]]
// of side 2n; x^H H x = r^T R(H) r with r = [Re x; Im x] (stacked, not
// interleaved). Symmetric matrices enter PSD cones in svec form: lower
// triangle, column major, off-diagonal entries scaled by sqrt(2).

#include "wetbeam/types.hpp"

namespace wetbeam::lowering {

/// Interleaved real form of a complex vector.
rvec interleave(const cvec& x);
/// Inverse of interleave. Throws ShapeError on odd length.
cvec deinterleave(const rvec& r);

/// [Re x; Im x].
rvec stack(const cvec& x);
/// Inverse of stack. Throws ShapeError on odd length.
cvec unstack(const rvec& r);

/// Real symmetric embedding of a Hermitian matrix.
rmat hermitian_embed(const cmat& H);
/// Recovers H from its embedding; averages the redundant blocks.
cmat hermitian_lift(const rmat& R);

int svec_size(int side);
/// Position of (i, j), i >= j, inside svec of a side-n matrix.
int svec_index(int i, int j, int side);
rvec svec(const rmat& S);
rmat smat(const rvec& v, int side);

} // namespace wetbeam::lowering
