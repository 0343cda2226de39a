// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/sca.hpp"

#include "wetbeam/errors.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <string>

namespace wetbeam {

using conic::ComplexExpr;
using conic::LinExpr;

namespace {

ComplexExpr precoder_var(const Subproblem& sub, int q, int n)
{
    const int i = sub.precoder_offset + 2 * (q * sub.chains + n);
    return {LinExpr::var(i), LinExpr::var(i + 1)};
}

ComplexExpr conj_analog_var(const Subproblem& sub, int j)
{
    const int i = sub.analog_offset + 2 * j;
    return {LinExpr::var(i), LinExpr::var(i + 1, -1.0)};
}

void check_precoders(const std::vector<cvec>& precoders, int chains)
{
    for (const auto& b : precoders)
        if (b.size() != chains)
            throw ShapeError("precoder length does not match the chain count");
}

double max_shortfall(const rvec& received, const rvec& targets)
{
    double worst = 0.0;
    for (Eigen::Index k = 0; k < targets.size(); ++k)
        worst = std::max(worst, (targets(k) - received(k)) / targets(k));
    return worst;
}

} // namespace

SurrogateAnchors make_anchors(const ArchitectureSpec& spec, const ChannelSet& channels,
                              const std::vector<cvec>& precoders, const cvec& analog, SurrogateScaling scaling)
{
    check_precoders(precoders, spec.chains);
    SurrogateAnchors a;
    a.precoders = precoders;
    a.analog = analog;
    a.channels = effective_channels(spec, channels, analog);
    const auto K = a.channels.size();
    a.z.assign(K, {});
    a.alpha.assign(K, {});
    a.nu.assign(K, {});
    for (std::size_t k = 0; k < K; ++k)
        for (const auto& b : precoders) {
            const cdouble z = a.channels[k].dot(b);
            double alpha = 1.0;
            const double zh = std::abs(z) * a.channels[k].norm();
            if (scaling == SurrogateScaling::Balanced && zh > 0.0 && b.norm() > 0.0)
                alpha = std::sqrt(b.norm() / zh);
            a.z[k].push_back(z);
            a.alpha[k].push_back(alpha);
            a.nu[k].push_back(alpha * z * a.channels[k] + b / alpha);
        }
    return a;
}

std::vector<Branch> select_hpa_branch(const std::vector<cvec>& precoders, const DohertyParams& params)
{
    params.validate();
    const rvec p = chain_output_powers(precoders, params.gain);
    std::vector<Branch> out;
    out.reserve(p.size());
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        if (p(n) > params.max_output)
            throw InfeasibleAnchorError("chain " + std::to_string(n) + " anchor output " + std::to_string(p(n)) +
                                        " W exceeds P_max");
        // a peaking chain pushed onto the knee lands a hair above it; without the
        // slack it would stay peaking and the activation bound would pin it there
        out.push_back(p(n) <= params.backoff() * (1.0 + kKneeSlack) ? Branch::Carrier : Branch::Peaking);
    }
    return out;
}

double surrogate_received_power(const cvec& heff, const cvec& b, cdouble z, const cvec& nu, double alpha)
{
    if (heff.size() != b.size() || nu.size() != b.size())
        throw ShapeError("surrogate operands differ in length");
    if (!(alpha > 0.0))
        throw ParameterError("surrogate weight must be positive");
    const cvec v = alpha * z * heff + b / alpha;
    return nu.dot(v).real() - 0.5 * nu.squaredNorm() - 0.5 * (alpha * z * heff - b / alpha).squaredNorm() -
           std::norm(z);
}

double linearized_received_power(const cvec& h, const cvec& b, cdouble z)
{
    if (h.size() != b.size())
        throw ShapeError("linearization operands differ in length");
    return 2.0 * (std::conj(z) * h.dot(b)).real() - std::norm(z);
}

double linearized_chain_power(const std::vector<cvec>& anchor, const std::vector<cvec>& point, int chain,
                              double gain)
{
    if (anchor.size() != point.size())
        throw ShapeError("anchor and point differ in stream count");
    double sum = 0.0;
    for (std::size_t q = 0; q < anchor.size(); ++q) {
        const cdouble bt = anchor[q](chain);
        sum += 2.0 * (std::conj(bt) * point[q](chain)).real() - std::norm(bt);
    }
    return gain * sum;
}

void ScaSettings::validate(int devices) const
{
    if (max_iterations < 1)
        throw ParameterError("SCA needs at least one iteration");
    if (!(tolerance > 0.0))
        throw ParameterError("SCA convergence threshold must be positive");
    if (targets.size() != devices)
        throw ShapeError("one received-power target per device is required");
    for (double t : targets)
        if (!(t > 0.0))
            throw ParameterError("received-power targets must be positive");
}

Subproblem assemble_subproblem(const ArchitectureSpec& spec, const SurrogateAnchors& anchors,
                               const ChannelSet& channels, const DohertyParams& doherty, const ScaSettings& settings)
{
    settings.validate(channels.devices());
    const int K = channels.devices();
    const int N = spec.chains;
    const int Q = static_cast<int>(anchors.precoders.size());
    if (static_cast<int>(anchors.z.size()) != K || static_cast<int>(anchors.nu.size()) != K)
        throw ShapeError("anchors do not match the device count");
    check_precoders(anchors.precoders, N);

    Subproblem sub;
    sub.streams = Q;
    sub.chains = N;
    sub.branches = select_hpa_branch(anchors.precoders, doherty);
    const double g = doherty.gain;
    const double pmax = doherty.max_output;
    const double l = doherty.ways;
    const double eta = doherty.peak_efficiency;
    sub.t_scale = pmax / (l * eta);

    conic::ProblemBuilder pb;
    sub.precoder_offset = pb.add_variables(2 * Q * N);
    sub.analog_size = spec.analog_size();
    sub.analog_offset = pb.add_variables(2 * sub.analog_size);
    sub.t_offset = pb.add_variables(N);

    const bool analog = spec.analog != AnalogKind::None;
    for (int k = 0; k < K; ++k) {
        const double s = settings.targets(k) / (g * spec.loss_factor);
        const double rs = 1.0 / std::sqrt(s);
        if (!analog) {
            const cvec& h = anchors.channels[k];
            LinExpr row(-s);
            for (int q = 0; q < Q; ++q) {
                const cdouble z = anchors.z[k][q];
                for (int n = 0; n < N; ++n)
                    row += 2.0 * conic::real_inner(h(n) * z, precoder_var(sub, q, n));
                row -= LinExpr(std::norm(z));
            }
            pb.add_nonnegative((1.0 / s) * row);
            continue;
        }
        const auto map = effective_channel_map(spec, channels, k);
        std::vector<ComplexExpr> heff(N);
        for (int n = 0; n < N; ++n) {
            ComplexExpr e(map.constant(n));
            for (const auto& [j, coeff] : map.terms[n])
                e += coeff * conj_analog_var(sub, j);
            heff[n] = std::move(e);
        }
        LinExpr u(-s);
        std::vector<LinExpr> w;
        w.reserve(2 * Q * N);
        for (int q = 0; q < Q; ++q) {
            const cdouble z = anchors.z[k][q];
            const double alpha = anchors.alpha[k][q];
            const cvec& nu = anchors.nu[k][q];
            for (int n = 0; n < N; ++n) {
                const ComplexExpr zh = (alpha * z) * heff[n];
                const ComplexExpr b = cdouble(1.0 / alpha) * precoder_var(sub, q, n);
                u += conic::real_inner(nu(n), zh + b);
                const ComplexExpr d = zh - b;
                w.push_back(rs * d.re);
                w.push_back(rs * d.im);
            }
            u -= LinExpr(0.5 * nu.squaredNorm() + std::norm(z));
        }
        pb.add_rotated_cone((1.0 / s) * u, LinExpr(1.0), w);
    }
    sub.tally.constraints += K;

    const double root = std::sqrt(g * pmax);
    const double cap = std::sqrt(pmax / g) * (1.0 - settings.power_margin);
    for (int n = 0; n < N; ++n) {
        std::vector<LinExpr> chain;
        for (int q = 0; q < Q; ++q) {
            const auto b = precoder_var(sub, q, n);
            chain.push_back(b.re);
            chain.push_back(b.im);
        }
        const LinExpr t = LinExpr::var(sub.t_offset + n, sub.t_scale);
        if (sub.branches[n] == Branch::Carrier) {
            pb.add_norm_bound(chain, (l * eta / root) * t);
            pb.add_norm_bound(chain, LinExpr(cap / l));
            sub.tally.constraints += 2;
        } else {
            pb.add_norm_bound(chain, (1.0 / ((l + 1.0) * root)) * (l * eta * t + LinExpr(pmax)));
            pb.add_norm_bound(chain, LinExpr(cap));
            const double knee = doherty.backoff();
            LinExpr act(-knee);
            for (int q = 0; q < Q; ++q) {
                const cdouble bt = anchors.precoders[q](n);
                act += (2.0 * g) * conic::real_inner(bt, precoder_var(sub, q, n));
                act -= LinExpr(g * std::norm(bt));
            }
            pb.add_nonnegative((1.0 / knee) * act);
            sub.tally.constraints += 3;
        }
        if (spec.tag != Architecture::FullyDigital) {
            pb.add_nonnegative(LinExpr::var(sub.t_offset + n));
            sub.tally.constraints += 1;
        }
        pb.add_objective(LinExpr::var(sub.t_offset + n));
    }
    for (int j = 0; j < sub.analog_size; ++j) {
        const int i = sub.analog_offset + 2 * j;
        pb.add_norm_bound({LinExpr::var(i), LinExpr::var(i + 1)}, LinExpr(spec.modulus));
    }
    sub.tally.constraints += sub.analog_size;
    sub.tally.variables = Q * N + N + sub.analog_size;
    sub.problem = pb.build();
    return sub;
}

rvec pack_point(const Subproblem& sub, const std::vector<cvec>& precoders, const cvec& analog, const rvec& t)
{
    if (static_cast<int>(precoders.size()) != sub.streams || analog.size() != sub.analog_size ||
        t.size() != sub.chains)
        throw ShapeError("point does not match the subproblem layout");
    rvec x = rvec::Zero(sub.problem.num_vars);
    for (int q = 0; q < sub.streams; ++q)
        for (int n = 0; n < sub.chains; ++n) {
            const int i = sub.precoder_offset + 2 * (q * sub.chains + n);
            x(i) = precoders[q](n).real();
            x(i + 1) = precoders[q](n).imag();
        }
    for (int j = 0; j < sub.analog_size; ++j) {
        x(sub.analog_offset + 2 * j) = analog(j).real();
        x(sub.analog_offset + 2 * j + 1) = analog(j).imag();
    }
    x.segment(sub.t_offset, sub.chains) = t / sub.t_scale;
    return x;
}

namespace {

void unpack_point(const Subproblem& sub, const rvec& x, std::vector<cvec>& precoders, cvec& analog)
{
    precoders.assign(sub.streams, cvec::Zero(sub.chains));
    for (int q = 0; q < sub.streams; ++q)
        for (int n = 0; n < sub.chains; ++n) {
            const int i = sub.precoder_offset + 2 * (q * sub.chains + n);
            precoders[q](n) = cdouble(x(i), x(i + 1));
        }
    analog.resize(sub.analog_size);
    for (int j = 0; j < sub.analog_size; ++j)
        analog(j) = cdouble(x(sub.analog_offset + 2 * j), x(sub.analog_offset + 2 * j + 1));
}

} // namespace

BeamformingSolution sca_optimize(const ArchitectureSpec& spec, const ChannelSet& channels,
                                 const BeamformingSolution& init, const DohertyParams& doherty,
                                 const ScaSettings& settings)
{
    settings.validate(channels.devices());
    if (init.analog.size() != spec.analog_size())
        throw ShapeError("initial analog configuration has the wrong length");
    check_precoders(init.precoders, spec.chains);

    BeamformingSolution cur = init;
    cur.architecture = spec.tag;
    cur.iterations.clear();
    cur.objective_trace.clear();
    cur.converged = false;
    cur.monotone = true;
    cur.chain_powers = chain_output_powers(cur.precoders, doherty.gain);
    double prev = hpa_power(cur.chain_powers, doherty);
    cur.objective_trace.push_back(prev);

    for (int it = 1; it <= settings.max_iterations; ++it) {
        const auto anchors = make_anchors(spec, channels, cur.precoders, cur.analog, settings.scaling);
        const auto sub = assemble_subproblem(spec, anchors, channels, doherty, settings);
        auto sol = conic::solve_socp(sub.problem, settings.solver);
        if (sol.status == conic::Status::NumericalFailure) {
            auto loose = settings.solver;
            loose.feasibility = std::max(loose.feasibility, 1e-7);
            loose.gap = std::max(loose.gap, 1e-7);
            loose.max_iterations = std::max(loose.max_iterations, 150);
            sol = conic::solve_socp(sub.problem, loose);
        }
        if (sol.status == conic::Status::Infeasible || sol.status == conic::Status::Unbounded)
            throw SubproblemError(std::string("subproblem ") + std::string(conic::to_string(sol.status)), it);
        if (!sol.optimal()) {
            if (it == 1)
                throw SubproblemError("subproblem solver did not converge", it);
            spdlog::warn("sca: stopping after solver failure at iteration {}", it);
            break;
        }

        BeamformingSolution next = cur;
        unpack_point(sub, sol.x, next.precoders, next.analog);
        next.chain_powers = chain_output_powers(next.precoders, doherty.gain);
        const double obj = hpa_power(next.chain_powers, doherty);
        next.received_powers = received_power(spec, next, channels, doherty.gain);

        IterationRecord rec;
        rec.iteration = it;
        rec.objective = obj;
        rec.max_violation = max_shortfall(next.received_powers, settings.targets);
        for (auto b : sub.branches)
            rec.peaking.push_back(b == Branch::Peaking);
        spdlog::debug("sca {:2d}: objective {:.9g} W, shortfall {:.2e}", it, obj, rec.max_violation);

        if (obj > prev * (1.0 + settings.monotone_slack)) {
            spdlog::warn("sca: objective rose from {} to {} at iteration {}", prev, obj, it);
            next.monotone = false;
        }
        next.iterations.push_back(std::move(rec));
        next.objective_trace.push_back(obj);
        cur = std::move(next);
        const double change = std::abs(prev - obj) / std::max(prev, 1e-300);
        prev = obj;
        // a small step that moved a chain across the knee is not a fixed point yet
        const bool settled = select_hpa_branch(cur.precoders, doherty) == sub.branches;
        if (prev == 0.0 || (change < settings.tolerance && settled)) {
            cur.converged = true;
            break;
        }
    }
    cur.received_powers = received_power(spec, cur, channels, doherty.gain);
    return cur;
}

} // namespace wetbeam
