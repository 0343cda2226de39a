// SPDX-License-Identifier: Apache-2.0
#include "cones.hpp"

#include "wetbeam/errors.hpp"
#include "wetbeam/lowering.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wetbeam::conic {

namespace {

using detail::Apply;
using detail::Block;
using detail::Scaling;
using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct OrthantRow {
    int block = 0;
    int local = 0;
    std::vector<int> cols;
    std::vector<double> vals;
};

struct SocBlock {
    int block = 0;
    std::vector<int> cols;
    rmat G;   // dim x |cols|
    rmat GJG; // G^T J G
};

// Each PSD column is kept as a sum of signed rank-one terms sigma v v^T.
struct PsdBlock {
    int block = 0;
    std::vector<int> cols;
    std::vector<int> owner; // factor -> position in cols
    rmat V;                 // side x factors
    rvec sigma;
};

class Kkt {
public:
    Kkt(const ConicProblem& p, const std::vector<Block>& blocks);

    bool factor(const Scaling& sc);
    void solve(const Scaling& sc, const rvec& bx, const rvec& by, const rvec& bz, rvec& ux, rvec& uy, rvec& uz,
               int refinement) const;

private:
    void solve_once(const Scaling& sc, const rvec& bx, const rvec& by, const rvec& bz, rvec& ux, rvec& uy,
                    rvec& uz) const;

    const ConicProblem& p_;
    const std::vector<Block>& blocks_;
    int n_;
    int neq_;
    std::vector<OrthantRow> orthant_;
    std::vector<SocBlock> soc_;
    std::vector<PsdBlock> psd_;
    rmat AtA_;
    rmat At_;
    Eigen::LLT<rmat> F_;
    Eigen::LLT<rmat> S_;
    rmat FinvAt_;
};

Kkt::Kkt(const ConicProblem& p, const std::vector<Block>& blocks)
    : p_(p), blocks_(blocks), n_(p.num_vars), neq_(static_cast<int>(p.b.size())) {
    const RowMajorSparse G = p.G;
    std::vector<int> mark(n_, -1);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const auto& b = blocks[bi];
        if (b.kind == ConeKind::NonNegative) {
            for (int r = b.offset; r < b.offset + b.dim; ++r) {
                OrthantRow row;
                row.block = static_cast<int>(bi);
                row.local = r - b.offset;
                for (RowMajorSparse::InnerIterator it(G, r); it; ++it) {
                    row.cols.push_back(static_cast<int>(it.col()));
                    row.vals.push_back(it.value());
                }
                orthant_.push_back(std::move(row));
            }
            continue;
        }
        std::vector<int> cols;
        for (int r = b.offset; r < b.offset + b.dim; ++r)
            for (RowMajorSparse::InnerIterator it(G, r); it; ++it)
                if (mark[it.col()] != static_cast<int>(bi)) {
                    mark[it.col()] = static_cast<int>(bi);
                    cols.push_back(static_cast<int>(it.col()));
                }
        std::sort(cols.begin(), cols.end());
        std::vector<int> pos(n_, -1);
        for (std::size_t k = 0; k < cols.size(); ++k) pos[cols[k]] = static_cast<int>(k);

        if (b.kind == ConeKind::SecondOrder) {
            SocBlock s;
            s.block = static_cast<int>(bi);
            s.cols = cols;
            s.G = rmat::Zero(b.dim, static_cast<Eigen::Index>(cols.size()));
            for (int r = b.offset; r < b.offset + b.dim; ++r)
                for (RowMajorSparse::InnerIterator it(G, r); it; ++it) s.G(r - b.offset, pos[it.col()]) = it.value();
            rmat JG = s.G;
            JG.bottomRows(b.dim - 1) *= -1.0;
            s.GJG = s.G.transpose() * JG;
            soc_.push_back(std::move(s));
        } else {
            // svec position -> (i, j)
            std::vector<int> ri(b.dim), ci(b.dim);
            int k = 0;
            for (int c = 0; c < b.side; ++c)
                for (int r = c; r < b.side; ++r, ++k) {
                    ri[k] = r;
                    ci[k] = c;
                }
            std::vector<std::vector<std::pair<int, double>>> entries(cols.size());
            for (int r = b.offset; r < b.offset + b.dim; ++r)
                for (RowMajorSparse::InnerIterator it(G, r); it; ++it)
                    entries[pos[it.col()]].emplace_back(r - b.offset, it.value());
            PsdBlock ps;
            ps.block = static_cast<int>(bi);
            ps.cols = cols;
            std::vector<rvec> vs;
            std::vector<double> sg;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                std::vector<int> supp;
                for (const auto& [q, v] : entries[j]) {
                    supp.push_back(ri[q]);
                    supp.push_back(ci[q]);
                }
                std::sort(supp.begin(), supp.end());
                supp.erase(std::unique(supp.begin(), supp.end()), supp.end());
                std::vector<int> loc(b.side, -1);
                for (std::size_t t = 0; t < supp.size(); ++t) loc[supp[t]] = static_cast<int>(t);
                const auto m = static_cast<Eigen::Index>(supp.size());
                rmat M = rmat::Zero(m, m);
                for (const auto& [q, v] : entries[j]) {
                    const int a = loc[ri[q]], c = loc[ci[q]];
                    if (a == c) {
                        M(a, a) += v;
                    } else {
                        M(a, c) += v / std::sqrt(2.0);
                        M(c, a) += v / std::sqrt(2.0);
                    }
                }
                Eigen::SelfAdjointEigenSolver<rmat> es(M);
                const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
                for (Eigen::Index t = 0; t < m; ++t) {
                    const double ev = es.eigenvalues()(t);
                    if (std::abs(ev) <= 1e-14 * scale) continue;
                    rvec v = rvec::Zero(b.side);
                    for (Eigen::Index u = 0; u < m; ++u) v(supp[u]) = es.eigenvectors()(u, t);
                    vs.push_back(std::move(v));
                    sg.push_back(ev);
                    ps.owner.push_back(static_cast<int>(j));
                }
            }
            ps.V.resize(b.side, static_cast<Eigen::Index>(vs.size()));
            ps.sigma.resize(static_cast<Eigen::Index>(vs.size()));
            for (std::size_t t = 0; t < vs.size(); ++t) {
                ps.V.col(static_cast<Eigen::Index>(t)) = vs[t];
                ps.sigma(static_cast<Eigen::Index>(t)) = sg[t];
            }
            psd_.push_back(std::move(ps));
        }
    }
    if (neq_ > 0) {
        const rmat A = rmat(p.A);
        At_ = A.transpose();
        AtA_ = At_ * A;
    }
}

bool Kkt::factor(const Scaling& sc) {
    rmat H = rmat::Zero(n_, n_);
    for (const auto& row : orthant_) {
        const double d = sc.blocks[row.block].d(row.local);
        const double w = 1.0 / (d * d);
        for (std::size_t a = 0; a < row.cols.size(); ++a)
            for (std::size_t c = 0; c < row.cols.size(); ++c)
                H(row.cols[a], row.cols[c]) += w * row.vals[a] * row.vals[c];
    }
    for (const auto& s : soc_) {
        const auto& bs = sc.blocks[s.block];
        rvec jw = bs.w;
        jw.tail(jw.size() - 1) *= -1.0;
        const rvec a = s.G.transpose() * jw;
        const rmat C = (2.0 * a * a.transpose() - s.GJG) / (bs.beta * bs.beta);
        for (std::size_t i = 0; i < s.cols.size(); ++i)
            for (std::size_t j = 0; j < s.cols.size(); ++j) H(s.cols[i], s.cols[j]) += C(i, j);
    }
    for (const auto& ps : psd_) {
        const auto& bs = sc.blocks[ps.block];
        const rmat P = bs.rti.transpose() * ps.V;
        const rmat Q = P.transpose() * P;
        for (Eigen::Index r = 0; r < Q.rows(); ++r)
            for (Eigen::Index t = 0; t < Q.cols(); ++t)
                H(ps.cols[ps.owner[r]], ps.cols[ps.owner[t]]) += ps.sigma(r) * ps.sigma(t) * Q(r, t) * Q(r, t);
    }
    rmat F = neq_ > 0 ? rmat(H + AtA_) : H;
    const double dmax = std::max(1.0, F.diagonal().cwiseAbs().maxCoeff());
    double reg = 1e-14 * dmax;
    for (int attempt = 0; attempt < 6; ++attempt) {
        rmat Fr = F;
        Fr.diagonal().array() += reg;
        F_.compute(Fr);
        if (F_.info() == Eigen::Success) break;
        reg *= 100.0;
    }
    if (F_.info() != Eigen::Success) return false;
    if (neq_ > 0) {
        FinvAt_ = F_.solve(At_);
        rmat S = At_.transpose() * FinvAt_;
        const double smax = std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
        double sreg = 1e-14 * smax;
        for (int attempt = 0; attempt < 6; ++attempt) {
            rmat Sr = S;
            Sr.diagonal().array() += sreg;
            S_.compute(Sr);
            if (S_.info() == Eigen::Success) break;
            sreg *= 100.0;
        }
        if (S_.info() != Eigen::Success) return false;
    }
    return true;
}

void Kkt::solve_once(const Scaling& sc, const rvec& bx, const rvec& by, const rvec& bz, rvec& ux, rvec& uy,
                     rvec& uz) const {
    const rvec t = detail::apply_scaling(blocks_, sc, detail::apply_scaling(blocks_, sc, bz, Apply::WInvT), Apply::WInv);
    rvec r1 = bx + p_.G.transpose() * t;
    if (neq_ > 0) {
        r1 += At_ * by;
        uy = S_.solve(FinvAt_.transpose() * r1 - by);
        ux = F_.solve(r1 - At_ * uy);
    } else {
        uy.resize(0);
        ux = F_.solve(r1);
    }
    const rvec g = p_.G * ux - bz;
    uz = detail::apply_scaling(blocks_, sc, detail::apply_scaling(blocks_, sc, g, Apply::WInvT), Apply::WInv);
}

void Kkt::solve(const Scaling& sc, const rvec& bx, const rvec& by, const rvec& bz, rvec& ux, rvec& uy, rvec& uz,
                int refinement) const {
    solve_once(sc, bx, by, bz, ux, uy, uz);
    for (int it = 0; it < refinement; ++it) {
        rvec e1 = bx - p_.G.transpose() * uz;
        rvec e2;
        if (neq_ > 0) {
            e1 -= p_.A.transpose() * uy;
            e2 = by - p_.A * ux;
        } else {
            e2.resize(0);
        }
        const rvec wwz = detail::apply_scaling(blocks_, sc, detail::apply_scaling(blocks_, sc, uz, Apply::W), Apply::WT);
        const rvec e3 = bz - (p_.G * ux - wwz);
        rvec dx, dy, dz;
        solve_once(sc, e1, e2, e3, dx, dy, dz);
        ux += dx;
        if (neq_ > 0) uy += dy;
        uz += dz;
    }
}

double safe_norm(const rvec& v) { return v.size() == 0 ? 0.0 : v.norm(); }

} // namespace

ConicSolution solve(const ConicProblem& problem, const Tolerances& tol) {
    problem.validate();
    const auto blocks = detail::make_blocks(problem.cones);
    const int n = problem.num_vars;
    const int m = problem.cone_rows();
    const int neq = static_cast<int>(problem.b.size());
    if (m == 0) throw ShapeError("conic problem without cone constraints");
    const int deg = detail::degree(blocks);
    const rvec e = detail::identity(blocks, m);
    const auto& c = problem.c;
    const auto& h = problem.h;
    const auto& b = problem.b;
    const SparseMatrix At = problem.A.transpose();
    const SparseMatrix Gt = problem.G.transpose();

    const double resx0 = std::max(1.0, c.norm());
    const double resy0 = std::max(1.0, safe_norm(b));
    const double resz0 = std::max(1.0, h.norm());

    Kkt kkt(problem, blocks);
    ConicSolution out;

    // starting point from two least-squares problems with W = I
    Scaling sc;
    sc.blocks.resize(blocks.size());
    {
        Scaling unit;
        unit.blocks.resize(blocks.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const auto& bl = blocks[i];
            auto& us = unit.blocks[i];
            if (bl.kind == ConeKind::NonNegative) {
                us.d = rvec::Ones(bl.dim);
            } else if (bl.kind == ConeKind::SecondOrder) {
                us.beta = 1.0;
                us.w = rvec::Zero(bl.dim);
                us.w(0) = 1.0;
            } else {
                us.R = rmat::Identity(bl.side, bl.side);
                us.rti = us.R;
                us.lam = rvec::Ones(bl.side);
            }
        }
        unit.lambda = e;
        sc = unit;
    }
    if (!kkt.factor(sc)) {
        out.status = Status::NumericalFailure;
        return out;
    }
    rvec x, y, z, s;
    {
        rvec ux, uy, uz;
        kkt.solve(sc, rvec::Zero(n), b, h, ux, uy, uz, tol.refinement_steps);
        x = ux;
        s = -uz;
        kkt.solve(sc, -c, rvec::Zero(neq), rvec::Zero(m), ux, uy, uz, tol.refinement_steps);
        y = uy;
        z = uz;
        const double ts = detail::max_shift(blocks, s);
        const double tz = detail::max_shift(blocks, z);
        if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
        if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }
    double tau = 1.0, kappa = 1.0;

    for (int iter = 0; iter <= tol.max_iterations; ++iter) {
        const rvec rx = At * y + Gt * z + c * tau;
        const rvec ry = problem.A * x - b * tau;
        const rvec rz = s + problem.G * x - h * tau;
        const double cx = c.dot(x);
        const double by = neq > 0 ? b.dot(y) : 0.0;
        const double hz = h.dot(z);
        const double rt = kappa + cx + by + hz;
        const double gap = s.dot(z);
        const double mu = (gap + tau * kappa) / (deg + 1);
        const double pcost = cx / tau;
        const double dcost = -(hz + by) / tau;
        const double pres = std::max(safe_norm(ry) / resy0, rz.norm() / resz0) / tau;
        const double dres = rx.norm() / resx0 / tau;
        const double abs_gap = gap / (tau * tau);
        const double rel_gap = abs_gap / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

        spdlog::trace("ipm {:3d} pcost {:+.8e} dcost {:+.8e} gap {:.2e} pres {:.2e} dres {:.2e} k/t {:.2e}", iter,
                      pcost, dcost, abs_gap, pres, dres, kappa / tau);

        out.iterations = iter;
        if (pres <= tol.feasibility && dres <= tol.feasibility && rel_gap <= tol.gap) {
            out.status = Status::Optimal;
            out.x = x / tau;
            out.s = s / tau;
            out.z = z / tau;
            out.y = y / tau;
            out.objective = c.dot(out.x) + problem.offset;
            out.primal_residual = pres;
            out.dual_residual = dres;
            out.gap = abs_gap;
            out.relative_gap = rel_gap;
            return out;
        }
        const double dual_obj = -(hz + by);
        if (dual_obj > 0.0) {
            const double res = (At * y + Gt * z).norm() / resx0 / dual_obj;
            if (res <= tol.feasibility) {
                out.status = Status::Infeasible;
                out.x = rvec::Zero(n);
                out.y = y / dual_obj;
                out.z = z / dual_obj;
                out.s = rvec::Zero(m);
                out.objective = std::numeric_limits<double>::infinity();
                out.dual_residual = res;
                return out;
            }
        }
        if (cx < 0.0) {
            const double res =
                std::max(safe_norm(rvec(problem.A * x)) / resy0, rvec(problem.G * x + s).norm() / resz0) / -cx;
            if (res <= tol.feasibility) {
                out.status = Status::Unbounded;
                out.x = x / -cx;
                out.s = s / -cx;
                out.y = rvec::Zero(neq);
                out.z = rvec::Zero(m);
                out.objective = -std::numeric_limits<double>::infinity();
                out.primal_residual = res;
                return out;
            }
        }
        if (iter == tol.max_iterations) break;

        if (!detail::nt_scaling(blocks, s, z, sc) || !kkt.factor(sc)) {
            spdlog::debug("ipm: scaling or factorization failed at iteration {}", iter);
            break;
        }
        const rvec& lambda = sc.lambda;
        const rvec lambda_sq = detail::jordan_product(blocks, lambda, lambda);

        rvec d1x, d1y, d1z;
        kkt.solve(sc, -c, b, h, d1x, d1y, d1z, tol.refinement_steps);
        const double d1dot = c.dot(d1x) + (neq > 0 ? b.dot(d1y) : 0.0) + h.dot(d1z);

        struct Step {
            rvec dx, dy, dz, ds, dzt, dst;
            double dtau = 0.0, dkappa = 0.0;
        };
        auto newton = [&](double eta, const rvec& ds_rhs, double dk_rhs) {
            Step st;
            const rvec ld = detail::jordan_divide(blocks, sc, ds_rhs);
            const rvec bz = -eta * rz + detail::apply_scaling(blocks, sc, ld, Apply::WT);
            rvec d2x, d2y, d2z;
            kkt.solve(sc, -eta * rx, -eta * ry, bz, d2x, d2y, d2z, tol.refinement_steps);
            const double d2dot = c.dot(d2x) + (neq > 0 ? b.dot(d2y) : 0.0) + h.dot(d2z);
            st.dtau = (-eta * rt + dk_rhs / tau - d2dot) / (d1dot - kappa / tau);
            st.dx = d2x + st.dtau * d1x;
            st.dy = d2y + st.dtau * d1y;
            st.dz = d2z + st.dtau * d1z;
            st.dzt = detail::apply_scaling(blocks, sc, st.dz, Apply::W);
            st.dst = -ld - st.dzt;
            st.ds = detail::apply_scaling(blocks, sc, st.dst, Apply::WT);
            st.dkappa = -(dk_rhs + kappa * st.dtau) / tau;
            return st;
        };
        auto step_length = [&](const Step& st) {
            double a = std::min(detail::max_step(blocks, sc, st.dst), detail::max_step(blocks, sc, st.dzt));
            if (st.dtau < 0.0) a = std::min(a, -tau / st.dtau);
            if (st.dkappa < 0.0) a = std::min(a, -kappa / st.dkappa);
            return a;
        };

        const Step aff = newton(1.0, lambda_sq, tau * kappa);
        const double a_aff = std::min(1.0, step_length(aff));
        const double sigma = std::pow(1.0 - a_aff, 3);

        const rvec corr = detail::jordan_product(blocks, aff.dst, aff.dzt);
        const rvec ds_rhs = lambda_sq + corr - sigma * mu * e;
        const double dk_rhs = tau * kappa + aff.dtau * aff.dkappa - sigma * mu;
        const Step st = newton(1.0 - sigma, ds_rhs, dk_rhs);
        const double amax = step_length(st);
        const double alpha = std::min(1.0, 0.99 * amax);
        if (!(alpha > 1e-12) || !std::isfinite(st.dtau)) {
            spdlog::debug("ipm: step length {} at iteration {}", alpha, iter);
            break;
        }
        x += alpha * st.dx;
        y += alpha * st.dy;
        z += alpha * st.dz;
        s += alpha * st.ds;
        tau += alpha * st.dtau;
        kappa += alpha * st.dkappa;
    }

    out.status = Status::NumericalFailure;
    out.x = x / tau;
    out.s = s / tau;
    out.z = z / tau;
    out.y = y / tau;
    out.objective = c.dot(out.x) + problem.offset;
    const rvec ry = problem.A * out.x - b;
    const rvec rz = out.s + problem.G * out.x - h;
    out.primal_residual = std::max(safe_norm(ry) / resy0, rz.norm() / resz0);
    out.dual_residual = (At * out.y + Gt * out.z + c).norm() / resx0;
    out.gap = out.s.dot(out.z);
    out.relative_gap = out.gap / std::max(1.0, std::abs(out.objective - problem.offset));
    return out;
}

ConicSolution solve_socp(const ConicProblem& problem, const Tolerances& tol) {
    if (problem.has_psd()) throw UnsupportedConfigurationError("solve_socp: problem has a PSD block");
    return solve(problem, tol);
}

ConicSolution solve_sdp(const ConicProblem& problem, const Tolerances& tol) {
    if (problem.psd_blocks() != 1) throw UnsupportedConfigurationError("solve_sdp: expected exactly one PSD block");
    return solve(problem, tol);
}

} // namespace wetbeam::conic
