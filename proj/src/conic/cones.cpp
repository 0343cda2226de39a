// SPDX-License-Identifier: Apache-2.0
#include "cones.hpp"

#include "wetbeam/lowering.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wetbeam::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x0^2 - |x1|^2, factored to limit cancellation
double jdot(const Eigen::Ref<const rvec>& x) {
    const double n1 = x.tail(x.size() - 1).norm();
    return (x(0) - n1) * (x(0) + n1);
}

rmat diag_scaled(const rmat& M, const rvec& lam) {
    // Lambda^{-1/2} M Lambda^{-1/2}
    const rvec r = lam.cwiseSqrt().cwiseInverse();
    return r.asDiagonal() * M * r.asDiagonal();
}

} // namespace

std::vector<Block> make_blocks(const std::vector<Cone>& cones) {
    std::vector<Block> out;
    out.reserve(cones.size());
    int off = 0;
    for (const auto& k : cones) {
        out.push_back({k.kind, off, k.dim, k.side});
        off += k.dim;
    }
    return out;
}

int degree(const std::vector<Block>& blocks) {
    int d = 0;
    for (const auto& b : blocks) {
        if (b.kind == ConeKind::NonNegative) d += b.dim;
        else if (b.kind == ConeKind::SecondOrder) d += 1;
        else d += b.side;
    }
    return d;
}

bool nt_scaling(const std::vector<Block>& blocks, const rvec& s, const rvec& z, Scaling& out) {
    out.blocks.resize(blocks.size());
    out.lambda.resize(s.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        auto& sc = out.blocks[i];
        const auto sb = s.segment(b.offset, b.dim);
        const auto zb = z.segment(b.offset, b.dim);
        if (b.kind == ConeKind::NonNegative) {
            if (sb.minCoeff() <= 0.0 || zb.minCoeff() <= 0.0) return false;
            sc.d = (sb.array() / zb.array()).sqrt().matrix();
            out.lambda.segment(b.offset, b.dim) = (sb.array() * zb.array()).sqrt().matrix();
        } else if (b.kind == ConeKind::SecondOrder) {
            const double js = jdot(sb), jz = jdot(zb);
            if (sb(0) <= 0.0 || zb(0) <= 0.0 || js <= 0.0 || jz <= 0.0) return false;
            const double sn = std::sqrt(js), zn = std::sqrt(jz);
            const rvec sbar = sb / sn;
            const rvec zbar = zb / zn;
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            sc.beta = std::sqrt(sn / zn);
            sc.w.resize(b.dim);
            sc.w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
            sc.w.tail(b.dim - 1) = (sbar.tail(b.dim - 1) - zbar.tail(b.dim - 1)) / (2.0 * gamma);
            // lambda = W z
            const double w0 = sc.w(0);
            const auto w1 = sc.w.tail(b.dim - 1);
            const double z0 = zb(0);
            const auto z1 = zb.tail(b.dim - 1);
            const double wz = w1.dot(z1);
            auto lam = out.lambda.segment(b.offset, b.dim);
            lam(0) = sc.beta * (w0 * z0 + wz);
            lam.tail(b.dim - 1) = sc.beta * (z1 + (z0 + wz / (1.0 + w0)) * w1);
        } else {
            const rmat S = lowering::smat(sb, b.side);
            const rmat Z = lowering::smat(zb, b.side);
            Eigen::LLT<rmat> ls(S), lz(Z);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
            const rmat Ls = ls.matrixL();
            const rmat Lz = lz.matrixL();
            const rmat M = Lz.transpose() * Ls;
            Eigen::BDCSVD<rmat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const rvec sv = svd.singularValues();
            if (sv.minCoeff() <= 0.0) return false;
            const rvec inv_sqrt = sv.cwiseSqrt().cwiseInverse();
            sc.R = Ls * svd.matrixV() * inv_sqrt.asDiagonal();
            sc.rti = Lz * svd.matrixU() * inv_sqrt.asDiagonal();
            sc.lam = sv;
            out.lambda.segment(b.offset, b.dim) = lowering::svec(rmat(sv.asDiagonal()));
        }
    }
    return true;
}

rvec apply_scaling(const std::vector<Block>& blocks, const Scaling& sc, const rvec& u, Apply op) {
    rvec out(u.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const auto& bs = sc.blocks[i];
        const auto ub = u.segment(b.offset, b.dim);
        auto ob = out.segment(b.offset, b.dim);
        const bool inverse = op == Apply::WInv || op == Apply::WInvT;
        if (b.kind == ConeKind::NonNegative) {
            if (inverse) ob = ub.cwiseQuotient(bs.d);
            else ob = ub.cwiseProduct(bs.d);
        } else if (b.kind == ConeKind::SecondOrder) {
            const double w0 = bs.w(0);
            const auto w1 = bs.w.tail(b.dim - 1);
            const double u0 = ub(0);
            const auto u1 = ub.tail(b.dim - 1);
            const double wu = w1.dot(u1);
            const double sgn = inverse ? -1.0 : 1.0;
            const double f = inverse ? 1.0 / bs.beta : bs.beta;
            ob(0) = f * (w0 * u0 + sgn * wu);
            ob.tail(b.dim - 1) = f * (u1 + (sgn * u0 + wu / (1.0 + w0)) * w1);
        } else {
            const rmat U = lowering::smat(ub, b.side);
            rmat V;
            switch (op) {
            case Apply::W: V = bs.R.transpose() * U * bs.R; break;
            case Apply::WT: V = bs.R * U * bs.R.transpose(); break;
            case Apply::WInv: V = bs.rti * U * bs.rti.transpose(); break;
            case Apply::WInvT: V = bs.rti.transpose() * U * bs.rti; break;
            }
            ob = lowering::svec(V);
        }
    }
    return out;
}

rvec identity(const std::vector<Block>& blocks, int rows) {
    rvec e = rvec::Zero(rows);
    for (const auto& b : blocks) {
        if (b.kind == ConeKind::NonNegative) e.segment(b.offset, b.dim).setOnes();
        else if (b.kind == ConeKind::SecondOrder) e(b.offset) = 1.0;
        else
            for (int j = 0; j < b.side; ++j) e(b.offset + lowering::svec_index(j, j, b.side)) = 1.0;
    }
    return e;
}

rvec jordan_product(const std::vector<Block>& blocks, const rvec& x, const rvec& y) {
    rvec out(x.size());
    for (const auto& b : blocks) {
        const auto xb = x.segment(b.offset, b.dim);
        const auto yb = y.segment(b.offset, b.dim);
        auto ob = out.segment(b.offset, b.dim);
        if (b.kind == ConeKind::NonNegative) {
            ob = xb.cwiseProduct(yb);
        } else if (b.kind == ConeKind::SecondOrder) {
            ob(0) = xb.dot(yb);
            ob.tail(b.dim - 1) = xb(0) * yb.tail(b.dim - 1) + yb(0) * xb.tail(b.dim - 1);
        } else {
            const rmat X = lowering::smat(xb, b.side);
            const rmat Y = lowering::smat(yb, b.side);
            const rmat P = X * Y;
            ob = lowering::svec(0.5 * (P + P.transpose()));
        }
    }
    return out;
}

rvec jordan_divide(const std::vector<Block>& blocks, const Scaling& sc, const rvec& v) {
    rvec out(v.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const auto lb = sc.lambda.segment(b.offset, b.dim);
        const auto vb = v.segment(b.offset, b.dim);
        auto ob = out.segment(b.offset, b.dim);
        if (b.kind == ConeKind::NonNegative) {
            ob = vb.cwiseQuotient(lb);
        } else if (b.kind == ConeKind::SecondOrder) {
            const double l0 = lb(0);
            const auto l1 = lb.tail(b.dim - 1);
            const double u0 = (l0 * vb(0) - l1.dot(vb.tail(b.dim - 1))) / jdot(lb);
            ob(0) = u0;
            ob.tail(b.dim - 1) = (vb.tail(b.dim - 1) - u0 * l1) / l0;
        } else {
            const rvec& lam = sc.blocks[i].lam;
            int k = 0;
            for (int c = 0; c < b.side; ++c)
                for (int r = c; r < b.side; ++r, ++k) ob(k) = 2.0 * vb(k) / (lam(r) + lam(c));
        }
    }
    return out;
}

double max_shift(const std::vector<Block>& blocks, const rvec& x) {
    double t = -kInf;
    for (const auto& b : blocks) {
        const auto xb = x.segment(b.offset, b.dim);
        if (b.kind == ConeKind::NonNegative) {
            t = std::max(t, -xb.minCoeff());
        } else if (b.kind == ConeKind::SecondOrder) {
            t = std::max(t, xb.tail(b.dim - 1).norm() - xb(0));
        } else {
            Eigen::SelfAdjointEigenSolver<rmat> es(lowering::smat(xb, b.side), Eigen::EigenvaluesOnly);
            t = std::max(t, -es.eigenvalues().minCoeff());
        }
    }
    return t;
}

double max_step(const std::vector<Block>& blocks, const Scaling& sc, const rvec& d) {
    double alpha = kInf;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const auto lb = sc.lambda.segment(b.offset, b.dim);
        const auto db = d.segment(b.offset, b.dim);
        if (b.kind == ConeKind::NonNegative) {
            for (int j = 0; j < b.dim; ++j)
                if (db(j) < 0.0) alpha = std::min(alpha, -lb(j) / db(j));
        } else if (b.kind == ConeKind::SecondOrder) {
            const double n = std::sqrt(jdot(lb));
            const rvec lbar = lb / n;
            const rvec dd = db / n;
            const double rho0 = lbar(0) * dd(0) - lbar.tail(b.dim - 1).dot(dd.tail(b.dim - 1));
            const rvec rho1 =
                dd.tail(b.dim - 1) - (rho0 + dd(0)) / (lbar(0) + 1.0) * lbar.tail(b.dim - 1);
            const double v = rho1.norm() - rho0;
            if (v > 0.0) alpha = std::min(alpha, 1.0 / v);
        } else {
            const rmat D = diag_scaled(lowering::smat(db, b.side), sc.blocks[i].lam);
            Eigen::SelfAdjointEigenSolver<rmat> es(D, Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
        }
    }
    return alpha;
}

} // namespace wetbeam::conic::detail
