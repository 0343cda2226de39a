// SPDX-License-Identifier: Apache-2.0
#pragma once

// Linear conic programs over products of the nonnegative orthant, second
// order cones and real PSD cones:
//
//   minimize    c^T x + offset
//   subject to  G x + s = h,  A x = b,  s in K.
//
// Cone rows are laid out block after block in the order of `cones`.
// A second-order block (s_0, s_1) requires s_0 >= ||s_1||. A PSD block of
// side n holds svec(S) (see lowering.hpp) and requires S to be PSD.

#include "wetbeam/types.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

namespace wetbeam::conic {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ConeKind { NonNegative, SecondOrder, Psd };

struct Cone {
    ConeKind kind = ConeKind::NonNegative;
    int dim = 1;  ///< number of rows in the block
    int side = 0; ///< PSD side, 0 otherwise
};

struct ConicProblem {
    int num_vars = 0;
    rvec c;
    double offset = 0.0;
    std::vector<Cone> cones;
    SparseMatrix G;
    rvec h;
    SparseMatrix A;
    rvec b;

    int cone_rows() const;
    int psd_blocks() const;
    bool has_psd() const { return psd_blocks() > 0; }
    /// Throws ShapeError on inconsistent dimensions or an unreferenced variable.
    void validate() const;
};

/// Affine expression sum_i coeff_i x_{var_i} + constant.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(double value) : constant(value) {} // NOLINT(google-explicit-constructor)
    static LinExpr var(int index, double coeff = 1.0);

    LinExpr& add(int index, double coeff);
    LinExpr& operator+=(const LinExpr& other);
    LinExpr& operator-=(const LinExpr& other);
    LinExpr& operator*=(double scale);
    double evaluate(const rvec& x) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);
LinExpr operator-(LinExpr a);

/// Complex affine expression; real and imaginary parts kept separately.
struct ComplexExpr {
    LinExpr re;
    LinExpr im;

    ComplexExpr() = default;
    ComplexExpr(LinExpr r, LinExpr i) : re(std::move(r)), im(std::move(i)) {}
    ComplexExpr(cdouble value) : re(value.real()), im(value.imag()) {} // NOLINT(google-explicit-constructor)

    ComplexExpr& operator+=(const ComplexExpr& other);
    ComplexExpr& operator-=(const ComplexExpr& other);
    cdouble evaluate(const rvec& x) const;
};

ComplexExpr operator*(cdouble a, const ComplexExpr& z);
ComplexExpr operator+(ComplexExpr a, const ComplexExpr& b);
ComplexExpr operator-(ComplexExpr a, const ComplexExpr& b);
/// Re{conj(a) z}.
LinExpr real_inner(cdouble a, const ComplexExpr& z);

class ProblemBuilder {
public:
    /// Returns the index of the first new variable.
    int add_variables(int count);
    int add_variable() { return add_variables(1); }
    /// Complex variable as two consecutive reals (re, im).
    ComplexExpr add_complex_variable();
    int num_vars() const { return num_vars_; }

    void add_objective(const LinExpr& expr);
    /// expr >= 0
    void add_nonnegative(const LinExpr& expr);
    /// lhs <= rhs
    void add_less_equal(const LinExpr& lhs, const LinExpr& rhs) { add_nonnegative(rhs - lhs); }
    /// entries[0] >= ||entries[1..]||
    void add_second_order(const std::vector<LinExpr>& entries);
    /// ||entries|| <= bound
    void add_norm_bound(const std::vector<LinExpr>& entries, const LinExpr& bound);
    /// 2 u v >= ||w||^2 with u, v >= 0, as a second-order cone.
    void add_rotated_cone(const LinExpr& u, const LinExpr& v, const std::vector<LinExpr>& w);
    /// smat(entries) PSD; entries in svec order.
    void add_psd(int side, const std::vector<LinExpr>& entries);
    /// expr == 0
    void add_equality(const LinExpr& expr);

    ConicProblem build() const;

private:
    void append_row(const LinExpr& expr);

    int num_vars_ = 0;
    std::vector<std::pair<int, double>> objective_;
    double offset_ = 0.0;
    std::vector<Cone> cones_;
    std::vector<Eigen::Triplet<double>> g_;
    std::vector<double> h_;
    std::vector<Eigen::Triplet<double>> a_;
    std::vector<double> b_;
};

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string_view to_string(Status status);

struct Tolerances {
    double feasibility = 1e-8;
    double gap = 1e-8;
    int max_iterations = 100;
    int refinement_steps = 2;
};

struct ConicSolution {
    Status status = Status::NumericalFailure;
    rvec x;
    rvec s;
    rvec z;
    rvec y;
    double objective = 0.0;       ///< c^T x + offset
    double primal_residual = 0.0; ///< relative
    double dual_residual = 0.0;   ///< relative
    double gap = 0.0;             ///< s^T z
    double relative_gap = 0.0;
    int iterations = 0;

    bool optimal() const { return status == Status::Optimal; }
};

/// Homogeneous self-dual primal-dual interior point method with
/// Nesterov-Todd scaling and Mehrotra correction.
ConicSolution solve(const ConicProblem& problem, const Tolerances& tol = {});
/// Rejects PSD blocks with UnsupportedConfigurationError.
ConicSolution solve_socp(const ConicProblem& problem, const Tolerances& tol = {});
/// Requires exactly one PSD block.
ConicSolution solve_sdp(const ConicProblem& problem, const Tolerances& tol = {});

/// Largest violation of any constraint at x: equality residuals, orthant
/// shortfall, second-order gap and negative PSD eigenvalues.
double max_violation(const ConicProblem& problem, const rvec& x);

/// Plain text dump: header line, then c, cones, G and A triplets, h and b.
void write_problem(std::ostream& out, const ConicProblem& problem);
ConicProblem read_problem(std::istream& in);

} // namespace wetbeam::conic
