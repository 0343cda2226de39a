// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/conic.hpp"
#include "wetbeam/errors.hpp"
#include "wetbeam/lowering.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace wetbeam;
using namespace wetbeam::lowering;
using Catch::Matchers::WithinAbs;

namespace {

cvec random_cvec(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> N;
    cvec v(n);
    for (int i = 0; i < n; ++i) v(i) = cdouble(N(rng), N(rng));
    return v;
}

cmat random_hermitian(std::mt19937_64& rng, int n) {
    cmat M(n, n);
    for (int j = 0; j < n; ++j) M.col(j) = random_cvec(rng, n);
    return 0.5 * (M + M.adjoint());
}

} // namespace

TEST_CASE("vector lowering round trips", "[lowering]") {
    std::mt19937_64 rng(1);
    const cvec x = random_cvec(rng, 7);
    CHECK((deinterleave(interleave(x)) - x).norm() == 0.0);
    CHECK((unstack(stack(x)) - x).norm() == 0.0);
    CHECK(interleave(x)(1) == x(0).imag());
    CHECK(stack(x)(7) == x(0).imag());
    CHECK_THROWS_AS(deinterleave(rvec::Zero(3)), ShapeError);
}

TEST_CASE("hermitian embedding preserves quadratic forms and spectra", "[lowering]") {
    std::mt19937_64 rng(2);
    const cmat H = random_hermitian(rng, 5);
    const cvec x = random_cvec(rng, 5);
    const rmat R = hermitian_embed(H);
    const double quad = (x.adjoint() * H * x)(0).real();
    const rvec r = stack(x);
    CHECK_THAT(r.dot(R * r), WithinAbs(quad, 1e-10));
    CHECK((hermitian_lift(R) - H).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<cmat> ec(H);
    Eigen::SelfAdjointEigenSolver<rmat> er(R);
    // each eigenvalue appears twice in the embedding
    for (int i = 0; i < 5; ++i) {
        CHECK_THAT(er.eigenvalues()(2 * i), WithinAbs(ec.eigenvalues()(i), 1e-10));
        CHECK_THAT(er.eigenvalues()(2 * i + 1), WithinAbs(ec.eigenvalues()(i), 1e-10));
    }
}

TEST_CASE("svec is an isometry", "[lowering]") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    rmat A(4, 4), B(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            A(i, j) = N(rng);
            B(i, j) = N(rng);
        }
    A = (A + A.transpose()).eval();
    B = (B + B.transpose()).eval();
    CHECK_THAT(svec(A).dot(svec(B)), WithinAbs((A * B).trace(), 1e-12));
    CHECK((smat(svec(A), 4) - A).norm() < 1e-14);
    CHECK(svec_size(4) == 10);
    CHECK(svec_index(0, 0, 4) == 0);
    CHECK(svec_index(3, 0, 4) == 3);
    CHECK(svec_index(1, 1, 4) == 4);
    CHECK(svec_index(3, 3, 4) == 9);
    CHECK(svec_index(2, 1, 4) == svec_index(1, 2, 4));
}

TEST_CASE("lower, solve and lift a complex minimum-norm problem", "[lowering][conic]") {
    // minimize ||x|| over complex x subject to a^H x = 1; closed form x = a / ||a||^2
    std::mt19937_64 rng(4);
    const cvec a = random_cvec(rng, 4);
    conic::ProblemBuilder pb;
    std::vector<conic::ComplexExpr> x;
    for (int i = 0; i < 4; ++i) x.push_back(pb.add_complex_variable());
    const int t = pb.add_variable();
    conic::ComplexExpr ax;
    std::vector<conic::LinExpr> parts;
    for (int i = 0; i < 4; ++i) {
        ax += std::conj(a(i)) * x[i];
        parts.push_back(x[i].re);
        parts.push_back(x[i].im);
    }
    pb.add_norm_bound(parts, conic::LinExpr::var(t));
    pb.add_equality(ax.re - 1.0);
    pb.add_equality(ax.im);
    pb.add_objective(conic::LinExpr::var(t));
    const auto sol = conic::solve_socp(pb.build());
    REQUIRE(sol.optimal());
    const cvec xs = deinterleave(sol.x.head(8));
    const cvec expected = a / a.squaredNorm();
    CHECK((xs - expected).norm() < 1e-6);
    CHECK_THAT(sol.objective, WithinAbs(1.0 / a.norm(), 1e-7));
}

TEST_CASE("lower, solve and lift a Hermitian SDP", "[lowering][conic]") {
    // minimize tr(C X) over Hermitian X >= 0 with tr X = 1: value lambda_min(C)
    std::mt19937_64 rng(5);
    const int n = 3;
    const cmat C = random_hermitian(rng, n);
    const rmat RC = hermitian_embed(C);
    const int side = 2 * n;
    conic::ProblemBuilder pb;
    const int Y = pb.add_variables(svec_size(side));
    std::vector<conic::LinExpr> entries;
    for (int k = 0; k < svec_size(side); ++k) entries.push_back(conic::LinExpr::var(Y + k));
    pb.add_psd(side, entries);
    conic::LinExpr tr;
    for (int j = 0; j < side; ++j) tr.add(Y + svec_index(j, j, side), 0.5);
    pb.add_equality(tr - 1.0);
    const rvec cv = svec(RC);
    conic::LinExpr obj;
    for (int k = 0; k < cv.size(); ++k) obj.add(Y + k, 0.5 * cv(k));
    pb.add_objective(obj);
    const auto sol = conic::solve_sdp(pb.build());
    REQUIRE(sol.optimal());
    const cmat X = hermitian_lift(smat(sol.x.segment(Y, svec_size(side)), side));
    Eigen::SelfAdjointEigenSolver<cmat> es(C);
    CHECK_THAT((C * X).trace().real(), WithinAbs(es.eigenvalues()(0), 1e-6));
    CHECK_THAT(X.trace().real(), WithinAbs(1.0, 1e-7));
    Eigen::SelfAdjointEigenSolver<cmat> ex(X);
    CHECK(ex.eigenvalues().minCoeff() >= -1e-7);
}
