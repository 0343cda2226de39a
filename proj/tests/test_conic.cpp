// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/conic.hpp"
#include "wetbeam/errors.hpp"
#include "wetbeam/lowering.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace wetbeam;
using namespace wetbeam::conic;
using Catch::Matchers::WithinAbs;

namespace {

// Dual objective and dual residual recomputed from the returned multipliers.
void check_certificate(const ConicProblem& p, const ConicSolution& sol) {
    REQUIRE(sol.optimal());
    const double dual = -p.h.dot(sol.z) - (p.b.size() ? p.b.dot(sol.y) : 0.0);
    const double primal = p.c.dot(sol.x);
    CHECK(std::abs(primal - dual) <= 1e-6 * std::max(1.0, std::abs(primal)));
    rvec r = p.G.transpose() * sol.z + p.c;
    if (p.b.size()) r += p.A.transpose() * sol.y;
    CHECK(r.norm() <= 1e-6 * std::max(1.0, p.c.norm()));
    CHECK(max_violation(p, sol.x) <= 1e-6);
}

ConicProblem random_socp(std::mt19937_64& rng, int n, int cones, int dim) {
    std::normal_distribution<double> N;
    ProblemBuilder pb;
    pb.add_variables(n);
    rvec x0(n);
    for (int i = 0; i < n; ++i) x0(i) = N(rng);
    // every cone strictly feasible at x0, plus a bound that keeps it bounded
    for (int k = 0; k < cones; ++k) {
        std::vector<LinExpr> rows(dim);
        for (int r = 1; r < dim; ++r) {
            for (int i = 0; i < n; ++i) rows[r].add(i, N(rng));
            rows[r].constant = N(rng);
        }
        double need = 0.0;
        for (int r = 1; r < dim; ++r) need += std::pow(rows[r].evaluate(x0), 2);
        for (int i = 0; i < n; ++i) rows[0].add(i, 0.1 * N(rng));
        rows[0].constant = std::sqrt(need) + 1.0 - (rows[0].evaluate(x0) - rows[0].constant);
        pb.add_second_order(rows);
    }
    std::vector<LinExpr> ball;
    for (int i = 0; i < n; ++i) ball.push_back(LinExpr::var(i));
    pb.add_norm_bound(ball, LinExpr(x0.norm() + 5.0));
    LinExpr obj;
    for (int i = 0; i < n; ++i) obj.add(i, N(rng));
    pb.add_objective(obj);
    return pb.build();
}

} // namespace

TEST_CASE("epigraph of a constant", "[conic]") {
    ProblemBuilder pb;
    const int x = pb.add_variable();
    const int t = pb.add_variable();
    pb.add_less_equal(LinExpr::var(x), LinExpr::var(t));
    pb.add_equality(LinExpr::var(x) - 5.0);
    pb.add_objective(LinExpr::var(t));
    const auto sol = solve_socp(pb.build());
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.x(t), WithinAbs(5.0, 1e-7));
    CHECK_THAT(sol.objective, WithinAbs(5.0, 1e-7));
}

TEST_CASE("minimum norm point on a line", "[conic]") {
    const rvec a = (rvec(2) << 3.0, 4.0).finished();
    ProblemBuilder pb;
    const int x = pb.add_variables(2);
    const int t = pb.add_variable();
    pb.add_norm_bound({LinExpr::var(x), LinExpr::var(x + 1)}, LinExpr::var(t));
    pb.add_equality(a(0) * LinExpr::var(x) + a(1) * LinExpr::var(x + 1) - 1.0);
    pb.add_objective(LinExpr::var(t));
    const auto p = pb.build();
    const auto sol = solve_socp(p);
    // projection of the origin onto {a^T x = 1}
    const rvec xstar = a / a.squaredNorm();
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.objective, WithinAbs(1.0 / a.norm(), 1e-7));
    CHECK((sol.x.head(2) - xstar).norm() < 1e-6);
    CHECK(sol.primal_residual <= 1e-8);
    CHECK(sol.relative_gap <= 1e-8);
    check_certificate(p, sol);
}

TEST_CASE("zero optimum of a shifted norm", "[conic]") {
    ProblemBuilder pb;
    const int x = pb.add_variables(2);
    const int t = pb.add_variable();
    pb.add_norm_bound({LinExpr::var(x) - 1.0, LinExpr::var(x + 1) - 2.0}, LinExpr::var(t));
    pb.add_objective(LinExpr::var(t));
    const auto sol = solve_socp(pb.build());
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.objective, WithinAbs(0.0, 1e-7));
    CHECK_THAT(sol.x(x), WithinAbs(1.0, 1e-4));
    CHECK_THAT(sol.x(x + 1), WithinAbs(2.0, 1e-4));
}

TEST_CASE("rotated cone bound", "[conic]") {
    // minimize u subject to 2 u * 1 >= x^2, x = 3  ->  u = 4.5
    ProblemBuilder pb;
    const int u = pb.add_variable();
    const int x = pb.add_variable();
    pb.add_rotated_cone(LinExpr::var(u), LinExpr(1.0), {LinExpr::var(x)});
    pb.add_equality(LinExpr::var(x) - 3.0);
    pb.add_objective(LinExpr::var(u));
    const auto sol = solve(pb.build());
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.objective, WithinAbs(4.5, 1e-7));
}

TEST_CASE("ball projection against a closed form", "[conic]") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 6;
        rvec p(n);
        for (int i = 0; i < n; ++i) p(i) = 3.0 * N(rng);
        ProblemBuilder pb;
        const int x = pb.add_variables(n);
        const int t = pb.add_variable();
        std::vector<LinExpr> diff, xs;
        for (int i = 0; i < n; ++i) {
            diff.push_back(LinExpr::var(x + i) - p(i));
            xs.push_back(LinExpr::var(x + i));
        }
        pb.add_norm_bound(diff, LinExpr::var(t));
        pb.add_norm_bound(xs, LinExpr(1.0));
        pb.add_objective(LinExpr::var(t));
        const auto prob = pb.build();
        const auto sol = solve_socp(prob);
        const double expected = std::max(0.0, p.norm() - 1.0);
        REQUIRE(sol.optimal());
        CHECK_THAT(sol.objective, WithinAbs(expected, 1e-7));
        check_certificate(prob, sol);
    }
}

TEST_CASE("random second-order programs satisfy their certificates", "[conic][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_socp(rng, 8, 5, 4);
        const auto sol = solve_socp(p);
        check_certificate(p, sol);
    }
}

TEST_CASE("solves are reproducible", "[conic][property]") {
    std::mt19937_64 rng(3);
    const auto p = random_socp(rng, 10, 6, 5);
    const auto a = solve(p);
    const auto b = solve(p);
    REQUIRE(a.optimal());
    CHECK(std::abs(a.objective - b.objective) <= 1e-7);
    CHECK(a.x == b.x);
}

TEST_CASE("objective scaling scales the optimum", "[conic][property]") {
    std::mt19937_64 rng(5);
    auto p = random_socp(rng, 8, 4, 4);
    const auto base = solve(p);
    REQUIRE(base.optimal());
    for (double f : {0.01, 3.0, 250.0}) {
        auto q = p;
        q.c *= f;
        const auto scaled = solve(q);
        REQUIRE(scaled.optimal());
        CHECK(std::abs(scaled.objective - f * base.objective) <= 1e-6 * std::max(1.0, std::abs(f * base.objective)));
        CHECK((scaled.x - base.x).norm() <= 1e-4 * std::max(1.0, base.x.norm()));
    }
}

TEST_CASE("unbounded and infeasible programs", "[conic]") {
    {
        ProblemBuilder pb;
        const int x = pb.add_variable();
        pb.add_less_equal(LinExpr::var(x), LinExpr(1.0));
        pb.add_objective(LinExpr::var(x));
        CHECK(solve(pb.build()).status == Status::Unbounded);
    }
    {
        ProblemBuilder pb;
        const int x = pb.add_variables(2);
        pb.add_norm_bound({LinExpr::var(x), LinExpr::var(x + 1)}, LinExpr(1.0));
        pb.add_nonnegative(LinExpr::var(x) - 2.0);
        pb.add_objective(LinExpr::var(x + 1));
        CHECK(solve(pb.build()).status == Status::Infeasible);
    }
}

namespace {

// Variables are svec entries of a side-n symmetric matrix.
std::vector<LinExpr> svec_vars(int first, int side) {
    std::vector<LinExpr> e;
    for (int k = 0; k < lowering::svec_size(side); ++k) e.push_back(LinExpr::var(first + k));
    return e;
}

LinExpr trace_of(int first, int side) {
    LinExpr t;
    for (int j = 0; j < side; ++j) t.add(first + lowering::svec_index(j, j, side), 1.0);
    return t;
}

} // namespace

TEST_CASE("rank-one trace minimization", "[conic][sdp]") {
    const int side = 2;
    ProblemBuilder pb;
    const int B = pb.add_variables(lowering::svec_size(side));
    pb.add_psd(side, svec_vars(B, side));
    pb.add_nonnegative(LinExpr::var(B + lowering::svec_index(0, 0, side)) - 1.0);
    pb.add_objective(trace_of(B, side));
    const auto p = pb.build();
    const auto sol = solve_sdp(p);
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.objective, WithinAbs(1.0, 1e-7));
    const rmat X = lowering::smat(sol.x.segment(B, 3), side);
    CHECK_THAT(X(0, 0), WithinAbs(1.0, 1e-6));
    CHECK_THAT(X(1, 1), WithinAbs(0.0, 1e-6));
    CHECK_THAT(X(0, 1), WithinAbs(0.0, 1e-6));
    Eigen::SelfAdjointEigenSolver<rmat> es(X);
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
    check_certificate(p, sol);
}

TEST_CASE("hand-built 2x2 optimum puts mass on the second variable", "[conic][sdp]") {
    const int side = 2;
    ProblemBuilder pb;
    const int B = pb.add_variables(3);
    const int t = pb.add_variable();
    pb.add_psd(side, svec_vars(B, side));
    // tr(diag(1,0) B) <= t, tr(I B) >= 1
    pb.add_less_equal(LinExpr::var(B + lowering::svec_index(0, 0, side)), LinExpr::var(t));
    pb.add_nonnegative(trace_of(B, side) - 1.0);
    pb.add_objective(LinExpr::var(t));
    const auto sol = solve_sdp(pb.build());
    REQUIRE(sol.optimal());
    CHECK_THAT(sol.objective, WithinAbs(0.0, 1e-7));
    const rmat X = lowering::smat(sol.x.segment(B, 3), side);
    CHECK_THAT(X(0, 0), WithinAbs(0.0, 1e-6));
    CHECK(X(1, 1) >= 1.0 - 1e-6);
}

TEST_CASE("contradictory traces are infeasible", "[conic][sdp]") {
    const int side = 2;
    ProblemBuilder pb;
    const int B = pb.add_variables(3);
    pb.add_psd(side, svec_vars(B, side));
    pb.add_less_equal(trace_of(B, side), LinExpr(1.0));
    pb.add_nonnegative(trace_of(B, side) - 2.0);
    pb.add_objective(trace_of(B, side));
    CHECK(solve_sdp(pb.build()).status == Status::Infeasible);
}

TEST_CASE("minimum eigenvalue as an SDP", "[conic][sdp][property]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N;
    for (int side : {3, 6, 12}) {
        rmat C(side, side);
        for (int i = 0; i < side; ++i)
            for (int j = 0; j < side; ++j) C(i, j) = N(rng);
        C = 0.5 * (C + C.transpose()).eval();
        ProblemBuilder pb;
        const int X = pb.add_variables(lowering::svec_size(side));
        pb.add_psd(side, svec_vars(X, side));
        pb.add_equality(trace_of(X, side) - 1.0);
        const rvec cv = lowering::svec(C);
        LinExpr obj;
        for (int k = 0; k < cv.size(); ++k) obj.add(X + k, cv(k));
        pb.add_objective(obj);
        const auto p = pb.build();
        const auto sol = solve_sdp(p);
        Eigen::SelfAdjointEigenSolver<rmat> es(C);
        REQUIRE(sol.optimal());
        CHECK_THAT(sol.objective, WithinAbs(es.eigenvalues()(0), 1e-6));
        check_certificate(p, sol);
    }
}

TEST_CASE("solver entry points check block types", "[conic]") {
    ProblemBuilder pb;
    const int B = pb.add_variables(3);
    pb.add_psd(2, svec_vars(B, 2));
    pb.add_objective(trace_of(B, 2));
    CHECK_THROWS_AS(solve_socp(pb.build()), UnsupportedConfigurationError);
    ProblemBuilder q;
    const int x = q.add_variable();
    q.add_nonnegative(LinExpr::var(x));
    q.add_objective(LinExpr::var(x));
    CHECK_THROWS_AS(solve_sdp(q.build()), UnsupportedConfigurationError);
}

TEST_CASE("validation rejects dangling variables and bad shapes", "[conic]") {
    ProblemBuilder pb;
    const int x = pb.add_variables(2);
    pb.add_nonnegative(LinExpr::var(x));
    pb.add_objective(LinExpr::var(x));
    CHECK_THROWS_AS(pb.build().validate(), ShapeError);
    auto p = ProblemBuilder{};
    p.add_variable();
    CHECK_THROWS_AS(p.add_nonnegative(LinExpr::var(4)), ShapeError);
}

TEST_CASE("text dump round trip", "[conic]") {
    std::mt19937_64 rng(23);
    const auto p = random_socp(rng, 5, 3, 3);
    std::stringstream ss;
    write_problem(ss, p);
    const auto q = read_problem(ss);
    CHECK(q.num_vars == p.num_vars);
    CHECK(q.cones.size() == p.cones.size());
    CHECK((rmat(q.G) - rmat(p.G)).norm() == 0.0);
    CHECK((q.h - p.h).norm() == 0.0);
    CHECK((q.c - p.c).norm() == 0.0);
    CHECK(std::abs(solve(q).objective - solve(p).objective) < 1e-12);
}
