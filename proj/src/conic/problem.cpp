// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/conic.hpp"

#include "wetbeam/errors.hpp"
#include "wetbeam/lowering.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace wetbeam::conic {

int ConicProblem::cone_rows() const {
    int rows = 0;
    for (const auto& k : cones) rows += k.dim;
    return rows;
}

int ConicProblem::psd_blocks() const {
    return static_cast<int>(std::count_if(cones.begin(), cones.end(),
                                          [](const Cone& k) { return k.kind == ConeKind::Psd; }));
}

void ConicProblem::validate() const {
    if (num_vars <= 0) throw ShapeError("conic problem without variables");
    if (c.size() != num_vars) throw ShapeError("objective length differs from variable count");
    for (const auto& k : cones) {
        if (k.dim <= 0) throw ShapeError("empty cone block");
        if (k.kind == ConeKind::NonNegative && k.side != 0) throw ShapeError("orthant block with a side");
        if (k.kind == ConeKind::Psd && (k.side <= 0 || k.dim != lowering::svec_size(k.side)))
            throw ShapeError("PSD block dimension does not match its side");
    }
    const int m = cone_rows();
    if (G.rows() != m || h.size() != m) throw ShapeError("cone rows do not match G/h");
    if (G.cols() != num_vars) throw ShapeError("G column count differs from variable count");
    if (A.rows() != b.size()) throw ShapeError("A rows do not match b");
    if (A.rows() > 0 && A.cols() != num_vars) throw ShapeError("A column count differs from variable count");
    if (!c.allFinite() || !h.allFinite() || !b.allFinite()) throw ShapeError("non-finite problem data");

    std::vector<char> used(num_vars, 0);
    for (int j = 0; j < G.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(G, j); it; ++it)
            if (it.value() != 0.0) used[j] = 1;
    for (int j = 0; j < A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            if (it.value() != 0.0) used[j] = 1;
    for (int j = 0; j < num_vars; ++j)
        if (!used[j]) throw ShapeError("variable " + std::to_string(j) + " appears in no constraint");
}

LinExpr LinExpr::var(int index, double coeff) {
    LinExpr e;
    e.terms.emplace_back(index, coeff);
    return e;
}

LinExpr& LinExpr::add(int index, double coeff) {
    if (coeff != 0.0) terms.emplace_back(index, coeff);
    return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    constant += other.constant;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
    for (const auto& [i, v] : other.terms) terms.emplace_back(i, -v);
    constant -= other.constant;
    return *this;
}

LinExpr& LinExpr::operator*=(double scale) {
    for (auto& t : terms) t.second *= scale;
    constant *= scale;
    return *this;
}

double LinExpr::evaluate(const rvec& x) const {
    double v = constant;
    for (const auto& [i, a] : terms) v += a * x(i);
    return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

ComplexExpr& ComplexExpr::operator+=(const ComplexExpr& other) {
    re += other.re;
    im += other.im;
    return *this;
}

ComplexExpr& ComplexExpr::operator-=(const ComplexExpr& other) {
    re -= other.re;
    im -= other.im;
    return *this;
}

cdouble ComplexExpr::evaluate(const rvec& x) const { return {re.evaluate(x), im.evaluate(x)}; }

ComplexExpr operator*(cdouble a, const ComplexExpr& z) {
    // (ar + i ai)(zr + i zi)
    return {a.real() * z.re - a.imag() * z.im, a.real() * z.im + a.imag() * z.re};
}

ComplexExpr operator+(ComplexExpr a, const ComplexExpr& b) { return a += b; }
ComplexExpr operator-(ComplexExpr a, const ComplexExpr& b) { return a -= b; }

LinExpr real_inner(cdouble a, const ComplexExpr& z) { return a.real() * z.re + a.imag() * z.im; }

int ProblemBuilder::add_variables(int count) {
    if (count < 0) throw ParameterError("negative variable count");
    const int first = num_vars_;
    num_vars_ += count;
    return first;
}

ComplexExpr ProblemBuilder::add_complex_variable() {
    const int i = add_variables(2);
    return {LinExpr::var(i), LinExpr::var(i + 1)};
}

void ProblemBuilder::add_objective(const LinExpr& expr) {
    objective_.insert(objective_.end(), expr.terms.begin(), expr.terms.end());
    offset_ += expr.constant;
}

void ProblemBuilder::append_row(const LinExpr& expr) {
    // G x + s = h with s = expr  =>  row of G is -coeffs, h is the constant
    const int row = static_cast<int>(h_.size());
    for (const auto& [i, v] : expr.terms) {
        if (i < 0 || i >= num_vars_) throw ShapeError("expression references an unknown variable");
        g_.emplace_back(row, i, -v);
    }
    h_.push_back(expr.constant);
}

void ProblemBuilder::add_nonnegative(const LinExpr& expr) {
    append_row(expr);
    cones_.push_back({ConeKind::NonNegative, 1, 0});
}

void ProblemBuilder::add_second_order(const std::vector<LinExpr>& entries) {
    if (entries.empty()) throw ShapeError("empty second-order cone");
    if (entries.size() == 1) {
        add_nonnegative(entries[0]);
        return;
    }
    for (const auto& e : entries) append_row(e);
    cones_.push_back({ConeKind::SecondOrder, static_cast<int>(entries.size()), 0});
}

void ProblemBuilder::add_norm_bound(const std::vector<LinExpr>& entries, const LinExpr& bound) {
    std::vector<LinExpr> rows;
    rows.reserve(entries.size() + 1);
    rows.push_back(bound);
    rows.insert(rows.end(), entries.begin(), entries.end());
    add_second_order(rows);
}

void ProblemBuilder::add_rotated_cone(const LinExpr& u, const LinExpr& v, const std::vector<LinExpr>& w) {
    // 2uv >= |w|^2  <=>  (u + v)/sqrt2 >= ||((u - v)/sqrt2, w)||
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<LinExpr> rows;
    rows.reserve(w.size() + 2);
    rows.push_back(r * (u + v));
    rows.push_back(r * (u - v));
    rows.insert(rows.end(), w.begin(), w.end());
    add_second_order(rows);
}

void ProblemBuilder::add_psd(int side, const std::vector<LinExpr>& entries) {
    if (side <= 0 || static_cast<int>(entries.size()) != lowering::svec_size(side))
        throw ShapeError("PSD entries do not match the side");
    for (const auto& e : entries) append_row(e);
    cones_.push_back({ConeKind::Psd, static_cast<int>(entries.size()), side});
}

void ProblemBuilder::add_equality(const LinExpr& expr) {
    const int row = static_cast<int>(b_.size());
    for (const auto& [i, v] : expr.terms) {
        if (i < 0 || i >= num_vars_) throw ShapeError("expression references an unknown variable");
        a_.emplace_back(row, i, v);
    }
    b_.push_back(-expr.constant);
}

ConicProblem ProblemBuilder::build() const {
    ConicProblem p;
    p.num_vars = num_vars_;
    p.c = rvec::Zero(num_vars_);
    for (const auto& [i, v] : objective_) {
        if (i < 0 || i >= num_vars_) throw ShapeError("objective references an unknown variable");
        p.c(i) += v;
    }
    p.offset = offset_;
    p.cones = cones_;
    p.G.resize(static_cast<Eigen::Index>(h_.size()), num_vars_);
    p.G.setFromTriplets(g_.begin(), g_.end());
    p.G.prune(0.0);
    p.h = Eigen::Map<const rvec>(h_.data(), static_cast<Eigen::Index>(h_.size()));
    p.A.resize(static_cast<Eigen::Index>(b_.size()), num_vars_);
    p.A.setFromTriplets(a_.begin(), a_.end());
    p.A.prune(0.0);
    p.b = Eigen::Map<const rvec>(b_.data(), static_cast<Eigen::Index>(b_.size()));
    return p;
}

std::string_view to_string(Status status) {
    switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

double max_violation(const ConicProblem& problem, const rvec& x) {
    double worst = 0.0;
    if (problem.A.rows() > 0) worst = (problem.A * x - problem.b).cwiseAbs().maxCoeff();
    const rvec s = problem.h - problem.G * x;
    int off = 0;
    for (const auto& k : problem.cones) {
        const auto blk = s.segment(off, k.dim);
        switch (k.kind) {
        case ConeKind::NonNegative: worst = std::max(worst, -blk.minCoeff()); break;
        case ConeKind::SecondOrder: worst = std::max(worst, blk.tail(k.dim - 1).norm() - blk(0)); break;
        case ConeKind::Psd: {
            Eigen::SelfAdjointEigenSolver<rmat> es(lowering::smat(blk, k.side), Eigen::EigenvaluesOnly);
            worst = std::max(worst, -es.eigenvalues().minCoeff());
            break;
        }
        }
        off += k.dim;
    }
    return worst;
}

namespace {

void write_triplets(std::ostream& out, const char* tag, const SparseMatrix& M) {
    out << tag << ' ' << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n';
    for (int j = 0; j < M.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(M, j); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void write_vector(std::ostream& out, const char* tag, const rvec& v) {
    out << tag << ' ' << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << (i + 1 == v.size() ? "" : " ");
    out << '\n';
}

void expect(std::istream& in, const std::string& tag) {
    std::string word;
    if (!(in >> word) || word != tag) throw ConfigError("problem dump: expected '" + tag + "'");
}

rvec read_vector(std::istream& in, const std::string& tag) {
    expect(in, tag);
    Eigen::Index n = 0;
    in >> n;
    rvec v(n);
    for (Eigen::Index i = 0; i < n; ++i) in >> v(i);
    if (!in) throw ConfigError("problem dump: truncated " + tag);
    return v;
}

SparseMatrix read_triplets(std::istream& in, const std::string& tag) {
    expect(in, tag);
    Eigen::Index rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(nnz);
    for (Eigen::Index k = 0; k < nnz; ++k) {
        int i = 0, j = 0;
        double v = 0.0;
        in >> i >> j >> v;
        t.emplace_back(i, j, v);
    }
    if (!in) throw ConfigError("problem dump: truncated " + tag);
    SparseMatrix M(rows, cols);
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

} // namespace

// Format (whitespace separated, one section per line group):
//   conic 1
//   vars <n>
//   offset <v>
//   c <n> values
//   cones <count>, then one line per block: l|q|s <dim> <side>
//   h <m> values
//   G <rows> <cols> <nnz>, then <row> <col> <value> lines
//   b <p> values
//   A <rows> <cols> <nnz>, then triplets
void write_problem(std::ostream& out, const ConicProblem& problem) {
    const auto old = out.precision(17);
    out << "conic 1\nvars " << problem.num_vars << "\noffset " << problem.offset << '\n';
    write_vector(out, "c", problem.c);
    out << "cones " << problem.cones.size() << '\n';
    for (const auto& k : problem.cones) {
        const char tag = k.kind == ConeKind::NonNegative ? 'l' : (k.kind == ConeKind::SecondOrder ? 'q' : 's');
        out << tag << ' ' << k.dim << ' ' << k.side << '\n';
    }
    write_vector(out, "h", problem.h);
    write_triplets(out, "G", problem.G);
    write_vector(out, "b", problem.b);
    write_triplets(out, "A", problem.A);
    out.precision(old);
}

ConicProblem read_problem(std::istream& in) {
    ConicProblem p;
    expect(in, "conic");
    int version = 0;
    in >> version;
    if (version != 1) throw ConfigError("problem dump: unsupported version");
    expect(in, "vars");
    in >> p.num_vars;
    expect(in, "offset");
    in >> p.offset;
    p.c = read_vector(in, "c");
    expect(in, "cones");
    std::size_t count = 0;
    in >> count;
    for (std::size_t i = 0; i < count; ++i) {
        char tag = 0;
        Cone k;
        in >> tag >> k.dim >> k.side;
        if (tag == 'l') k.kind = ConeKind::NonNegative;
        else if (tag == 'q') k.kind = ConeKind::SecondOrder;
        else if (tag == 's') k.kind = ConeKind::Psd;
        else throw ConfigError("problem dump: unknown cone tag");
        p.cones.push_back(k);
    }
    p.h = read_vector(in, "h");
    p.G = read_triplets(in, "G");
    p.b = read_vector(in, "b");
    p.A = read_triplets(in, "A");
    if (p.A.rows() == 0) p.A.resize(0, p.num_vars);
    return p;
}

} // namespace wetbeam::conic
