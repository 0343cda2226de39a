// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/lowering.hpp"

#include "wetbeam/errors.hpp"

#include <cmath>
#include <utility>

namespace wetbeam::lowering {

rvec interleave(const cvec& x) {
    rvec r(2 * x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        r(2 * i) = x(i).real();
        r(2 * i + 1) = x(i).imag();
    }
    return r;
}

cvec deinterleave(const rvec& r) {
    if (r.size() % 2 != 0) throw ShapeError("deinterleave: odd length");
    cvec x(r.size() / 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = cdouble(r(2 * i), r(2 * i + 1));
    return x;
}

rvec stack(const cvec& x) {
    rvec r(2 * x.size());
    r.head(x.size()) = x.real();
    r.tail(x.size()) = x.imag();
    return r;
}

cvec unstack(const rvec& r) {
    if (r.size() % 2 != 0) throw ShapeError("unstack: odd length");
    const Eigen::Index n = r.size() / 2;
    cvec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = cdouble(r(i), r(n + i));
    return x;
}

rmat hermitian_embed(const cmat& H) {
    if (H.rows() != H.cols()) throw ShapeError("hermitian_embed: matrix not square");
    const Eigen::Index n = H.rows();
    rmat R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = H.real();
    R.topRightCorner(n, n) = -H.imag();
    R.bottomLeftCorner(n, n) = H.imag();
    R.bottomRightCorner(n, n) = H.real();
    return R;
}

cmat hermitian_lift(const rmat& R) {
    if (R.rows() != R.cols() || R.rows() % 2 != 0) throw ShapeError("hermitian_lift: bad shape");
    const Eigen::Index n = R.rows() / 2;
    const rmat re = 0.5 * (R.topLeftCorner(n, n) + R.bottomRightCorner(n, n));
    const rmat im = 0.5 * (R.bottomLeftCorner(n, n) - R.topRightCorner(n, n));
    cmat H(n, n);
    H.real() = re;
    H.imag() = im;
    return H;
}

int svec_size(int side) { return side * (side + 1) / 2; }

int svec_index(int i, int j, int side) {
    if (i < j) std::swap(i, j);
    // columns 0..j-1 hold side, side-1, ... entries
    return j * side - j * (j - 1) / 2 + (i - j);
}

rvec svec(const rmat& S) {
    if (S.rows() != S.cols()) throw ShapeError("svec: matrix not square");
    const int n = static_cast<int>(S.rows());
    rvec v(svec_size(n));
    int k = 0;
    for (int j = 0; j < n; ++j) {
        v(k++) = S(j, j);
        for (int i = j + 1; i < n; ++i) v(k++) = std::sqrt(2.0) * 0.5 * (S(i, j) + S(j, i));
    }
    return v;
}

rmat smat(const rvec& v, int side) {
    if (v.size() != svec_size(side)) throw ShapeError("smat: length does not match side");
    rmat S(side, side);
    int k = 0;
    for (int j = 0; j < side; ++j) {
        S(j, j) = v(k++);
        for (int i = j + 1; i < side; ++i) {
            S(i, j) = v(k++) / std::sqrt(2.0);
            S(j, i) = S(i, j);
        }
    }
    return S;
}

} // namespace wetbeam::lowering
