// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/init.hpp"

#include "wetbeam/errors.hpp"
#include "wetbeam/lowering.hpp"
#include "wetbeam/rng.hpp"

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace wetbeam {

ClusterRule cluster_rule_from_string(const std::string& name)
{
    if (name == "strongest")
        return ClusterRule::Strongest;
    if (name == "weakest")
        return ClusterRule::Weakest;
    throw ConfigError("cluster_rule must be 'strongest' or 'weakest', got '" + name + "'");
}

std::vector<std::vector<int>> cluster_its_elements(const cmat& A, ClusterRule rule)
{
    const int M = static_cast<int>(A.rows());
    const int N = static_cast<int>(A.cols());
    if (N < 1)
        throw ShapeError("feeder channel has no antennas");
    std::vector<std::vector<int>> sets(N);
    for (int m = 0; m < M; ++m) {
        int best = 0;
        double value = std::norm(A(m, 0));
        for (int n = 1; n < N; ++n) {
            const double v = std::norm(A(m, n));
            if (rule == ClusterRule::Strongest ? v > value : v < value) {
                best = n;
                value = v;
            }
        }
        sets[best].push_back(m);
    }
    return sets;
}

double allocation_weight(const std::vector<int>& counts, int device)
{
    double w = static_cast<double>(counts.at(device)) * counts.at(device);
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (static_cast<int>(k) != device)
            w += counts[k];
    return w;
}

std::vector<int> allocate_rf_chains(const std::vector<cvec>& H, int chains)
{
    const int K = static_cast<int>(H.size());
    if (K < 1)
        throw UnsupportedConfigurationError("chain allocation needs at least one device");
    if (chains < K)
        throw UnsupportedConfigurationError("fewer RF chains (" + std::to_string(chains) + ") than devices (" +
                                            std::to_string(K) + ") is not supported by this initializer");
    std::vector<int> counts(K, 1);
    int total = K;
    while (total < chains) {
        int best = 0;
        double value = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            const double v = allocation_weight(counts, k) * H[k].squaredNorm();
            if (v < value) {
                value = v;
                best = k;
            }
        }
        ++counts[best];
        ++total;
    }
    return counts;
}

long long assignment_count(const std::vector<int>& counts, long long cap)
{
    __int128 result = 1;
    int placed = 0;
    for (int c : counts) {
        if (c < 0)
            throw ParameterError("negative chain count");
        // multiply by C(placed + c, c)
        __int128 binom = 1;
        for (int i = 1; i <= c; ++i) {
            binom = binom * (placed + i) / i;
            if (binom > cap)
                return -1;
        }
        placed += c;
        result *= binom;
        if (result > cap)
            return -1;
    }
    return static_cast<long long>(result);
}

std::vector<std::vector<int>> enumerate_assignments(const std::vector<int>& counts, long long cap)
{
    const long long total = assignment_count(counts, cap);
    if (total < 0)
        throw CombinatorialBlowupError("more than " + std::to_string(cap) +
                                       " chain assignments; reduce the number of RF chains");
    std::vector<int> slots;
    for (std::size_t k = 0; k < counts.size(); ++k)
        slots.insert(slots.end(), counts[k], static_cast<int>(k));
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(total));
    do {
        out.push_back(slots);
    } while (std::next_permutation(slots.begin(), slots.end()));
    return out;
}

cvec init_phases(const std::vector<std::vector<int>>& partition, const std::vector<int>& assignment, const cmat& A,
                 const std::vector<cvec>& H)
{
    if (partition.size() != assignment.size() || static_cast<Eigen::Index>(partition.size()) != A.cols())
        throw ShapeError("partition, assignment and feeder channel disagree on N");
    cvec phi = cvec::Ones(A.rows());
    for (std::size_t n = 0; n < partition.size(); ++n) {
        const int k = assignment[n];
        if (k < 0 || k >= static_cast<int>(H.size()))
            throw ShapeError("assignment refers to an unknown device");
        for (int m : partition[n])
            phi(m) = std::polar(1.0, std::arg(H[k](m)) - std::arg(A(m, static_cast<Eigen::Index>(n))));
    }
    return phi;
}

MinMaxPowerResult min_max_power_precoders(const std::vector<cvec>& heff, const rvec& targets,
                                          const DohertyParams& doherty, const conic::Tolerances& tol)
{
    MinMaxPowerResult res;
    const int K = static_cast<int>(heff.size());
    if (targets.size() != K)
        throw ShapeError("one target per effective channel is required");
    if (K == 0) {
        res.B.resize(0, 0);
        return res;
    }
    const int N = static_cast<int>(heff.front().size());
    for (const auto& h : heff) {
        if (h.size() != N)
            throw ShapeError("effective channels differ in length");
        if (h.squaredNorm() == 0.0)
            throw InitializationError("an effective channel is identically zero");
    }
    for (double t : targets)
        if (!(t > 0.0))
            throw ParameterError("min-max power targets must be positive");

    // Dual LMI: maximize sum y s.t. sum lambda = 1, lambda, y >= 0,
    // diag(lambda) - sum_k y_k h_k h_k^H / target_k PSD (real embedding).
    const int side = 2 * N;
    conic::ProblemBuilder pb;
    const int lam = pb.add_variables(N);
    const int y = pb.add_variables(K);
    for (int n = 0; n < N; ++n)
        pb.add_nonnegative(conic::LinExpr::var(lam + n));
    for (int k = 0; k < K; ++k)
        pb.add_nonnegative(conic::LinExpr::var(y + k));
    conic::LinExpr sum(-1.0);
    for (int n = 0; n < N; ++n)
        sum.add(lam + n, 1.0);
    pb.add_equality(sum);

    std::vector<rmat> Rk;
    for (int k = 0; k < K; ++k)
        Rk.push_back(lowering::hermitian_embed(heff[k] * heff[k].adjoint() / targets(k)));
    std::vector<conic::LinExpr> entries;
    entries.reserve(lowering::svec_size(side));
    for (int c = 0; c < side; ++c)
        for (int r = c; r < side; ++r) {
            const double f = r == c ? 1.0 : std::sqrt(2.0);
            conic::LinExpr e;
            if (r == c)
                e.add(lam + (r % N), 1.0);
            for (int k = 0; k < K; ++k)
                e.add(y + k, -f * Rk[k](r, c));
            entries.push_back(std::move(e));
        }
    const int psd_offset = N + K;
    pb.add_psd(side, entries);
    for (int k = 0; k < K; ++k)
        pb.add_objective(conic::LinExpr::var(y + k, -1.0));

    res.solver = conic::solve_sdp(pb.build(), tol);
    if (!res.solver.optimal())
        throw InitializationError(std::string("min-max power SDP ended with status ") +
                                  std::string(conic::to_string(res.solver.status)));

    const rmat Y = lowering::smat(res.solver.z.segment(psd_offset, lowering::svec_size(side)), side);
    cmat Bhat(N, N);
    Bhat.real() = Y.topLeftCorner(N, N) + Y.bottomRightCorner(N, N);
    Bhat.imag() = Y.bottomLeftCorner(N, N) - Y.topRightCorner(N, N);
    Bhat = (0.5 * (Bhat + Bhat.adjoint())).eval();
    const double g = doherty.gain;
    res.B = Bhat / g;
    res.t = Bhat.diagonal().real().maxCoeff();

    Eigen::SelfAdjointEigenSolver<cmat> es(res.B);
    const rvec ev = es.eigenvalues().reverse();
    res.eigenvalues = ev;
    const double top = ev.size() ? ev(0) : 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(ev(i) > 1e-9 * top))
            break;
        const Eigen::Index col = ev.size() - 1 - i;
        res.precoders.push_back(std::sqrt(ev(i)) * es.eigenvectors().col(col));
    }

    // recovery check and an exact top-up onto the targets
    double scale = 1.0;
    for (int k = 0; k < K; ++k) {
        double got = 0.0;
        for (const auto& b : res.precoders)
            got += std::norm(heff[k].dot(b));
        const double want = (heff[k].adjoint() * res.B * heff[k])(0).real();
        if (std::abs(got - want) > 1e-6 * std::max(want, 1e-300))
            throw InitializationError("eigen-recovery does not reproduce tr(H B)");
        scale = std::max(scale, targets(k) / (g * got));
    }
    if (scale > 1.0)
        for (auto& b : res.precoders)
            b *= std::sqrt(scale);

    const rvec p = chain_output_powers(res.precoders, g);
    if (p.size() && p.maxCoeff() > doherty.max_output)
        throw InfeasibleAnchorError("min-max power start needs " + std::to_string(p.maxCoeff()) + " W on one chain, above P_max");
    return res;
}

namespace {

InitialPoint finish(const ArchitectureSpec& spec, const ChannelSet& channels, const DohertyParams& doherty,
                    std::vector<cvec> precoders, cvec analog)
{
    InitialPoint ip;
    ip.solution.architecture = spec.tag;
    ip.solution.precoders = std::move(precoders);
    ip.solution.analog = std::move(analog);
    ip.solution.chain_powers = chain_output_powers(ip.solution.precoders, doherty.gain);
    if (ip.solution.chain_powers.size() == 0)
        ip.solution.chain_powers = rvec::Zero(spec.chains);
    ip.solution.received_powers = received_power(spec, ip.solution, channels, doherty.gain);
    ip.score = hpa_power(ip.solution.chain_powers, doherty);
    return ip;
}

rvec effective_targets(const ArchitectureSpec& spec, const rvec& targets)
{
    return targets / spec.loss_factor;
}

void require(const ArchitectureSpec& spec, Architecture tag)
{
    if (spec.tag != tag)
        throw UnsupportedConfigurationError(std::string("initializer does not match architecture ") +
                                            std::string(to_string(spec.tag)));
}

} // namespace

InitialPoint evaluate_assignment(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                                 const DohertyParams& doherty, const std::vector<std::vector<int>>& partition,
                                 const std::vector<int>& assignment, const conic::Tolerances& tol)
{
    require(spec, Architecture::Its);
    cvec phi = init_phases(partition, assignment, channels.A, channels.H);
    const auto heff = effective_channels(spec, channels, phi);
    auto mm = min_max_power_precoders(heff, effective_targets(spec, targets), doherty, tol);
    InitialPoint ip = finish(spec, channels, doherty, std::move(mm.precoders), std::move(phi));
    ip.partition = partition;
    ip.assignment = assignment;
    return ip;
}

InitialPoint init_its(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                      const DohertyParams& doherty, const InitSettings& settings)
{
    require(spec, Architecture::Its);
    const auto counts = allocate_rf_chains(channels.H, spec.chains);
    const auto perms = enumerate_assignments(counts, settings.permutation_cap);
    const auto partition = cluster_its_elements(channels.A, settings.cluster_rule);

    std::vector<InitialPoint> points(perms.size());
    std::vector<AssignmentDiagnostic> diags(perms.size());
    auto evaluate = [&](std::size_t i) {
        diags[i].assignment = perms[i];
        try {
            points[i] = evaluate_assignment(spec, channels, targets, doherty, partition, perms[i], settings.solver);
            diags[i].feasible = true;
            diags[i].score = points[i].score;
        } catch (const std::exception& e) {
            diags[i].feasible = false;
            diags[i].message = e.what();
        }
    };
    const int workers = std::max(1, std::min<int>(settings.workers, static_cast<int>(perms.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < perms.size(); ++i)
            evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < perms.size(); i = next++)
                    evaluate(i);
            });
        for (auto& t : pool)
            t.join();
    }

    // permutations are in lexicographic order, so the first minimum wins ties
    std::size_t best = perms.size();
    for (std::size_t i = 0; i < perms.size(); ++i)
        if (diags[i].feasible && (best == perms.size() || diags[i].score < diags[best].score))
            best = i;
    if (best == perms.size()) {
        std::string msg = "no feasible chain assignment:";
        for (const auto& d : diags)
            msg += " [" + d.message + "]";
        throw InitializationError(msg);
    }
    InitialPoint out = std::move(points[best]);
    out.counts = counts;
    out.diagnostics = std::move(diags);
    return out;
}

InitialPoint init_hybrid(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                         const DohertyParams& doherty, const InitSettings& settings)
{
    if (spec.analog != AnalogKind::FullMatrix && spec.analog != AnalogKind::BlockDiagonal)
        throw UnsupportedConfigurationError("init_hybrid needs a hybrid architecture");
    const auto counts = allocate_rf_chains(channels.H, spec.chains);
    std::vector<int> assignment;
    for (std::size_t k = 0; k < counts.size(); ++k)
        assignment.insert(assignment.end(), counts[k], static_cast<int>(k));

    cvec analog(spec.analog_size());
    for (int n = 0; n < spec.chains; ++n) {
        const cvec& h = channels.H[assignment[n]];
        if (spec.analog == AnalogKind::FullMatrix) {
            for (int m = 0; m < spec.elements; ++m)
                analog(n * spec.elements + m) = std::polar(spec.modulus, std::arg(h(m)));
        } else {
            for (int l = 0; l < spec.block; ++l)
                analog(n * spec.block + l) = std::polar(spec.modulus, std::arg(h(n * spec.block + l)));
        }
    }
    const auto heff = effective_channels(spec, channels, analog);
    auto mm = min_max_power_precoders(heff, effective_targets(spec, targets), doherty, settings.solver);
    InitialPoint ip = finish(spec, channels, doherty, std::move(mm.precoders), std::move(analog));
    ip.counts = counts;
    ip.assignment = assignment;
    return ip;
}

InitialPoint init_fully_digital(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                                const DohertyParams& doherty, const InitSettings& settings)
{
    require(spec, Architecture::FullyDigital);
    const auto heff = effective_channels(spec, channels, cvec());
    auto mm = min_max_power_precoders(heff, effective_targets(spec, targets), doherty, settings.solver);
    return finish(spec, channels, doherty, std::move(mm.precoders), cvec());
}

InitialPoint initialize(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                        const DohertyParams& doherty, const InitSettings& settings)
{
    switch (spec.tag) {
    case Architecture::Its:
        return init_its(spec, channels, targets, doherty, settings);
    case Architecture::FullyDigital:
        return init_fully_digital(spec, channels, targets, doherty, settings);
    case Architecture::HybridFull:
    case Architecture::HybridPartial:
        return init_hybrid(spec, channels, targets, doherty, settings);
    }
    throw UnsupportedConfigurationError("unknown architecture");
}

InitialPoint init_its_random(const ArchitectureSpec& spec, const ChannelSet& channels, const rvec& targets,
                             const DohertyParams& doherty, std::uint64_t seed, const conic::Tolerances& tol)
{
    require(spec, Architecture::Its);
    std::mt19937_64 rng(seed);
    cvec phi(spec.elements);
    for (int m = 0; m < spec.elements; ++m)
        phi(m) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
    const auto heff = effective_channels(spec, channels, phi);
    auto mm = min_max_power_precoders(heff, effective_targets(spec, targets), doherty, tol);
    return finish(spec, channels, doherty, std::move(mm.precoders), std::move(phi));
}

} // namespace wetbeam
