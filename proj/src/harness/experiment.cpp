// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/harness/experiment.hpp"

#include "wetbeam/architectures.hpp"
#include "wetbeam/channel.hpp"
#include "wetbeam/errors.hpp"
#include "wetbeam/geometry.hpp"
#include "wetbeam/init.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/rng.hpp"
#include "wetbeam/sca.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <thread>

namespace wetbeam::harness {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Instance {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    ScenarioGeometry geometry;
    ChannelSet channels;
    PowerModel model;
};

Instance make_instance(const ExperimentConfig& config, std::uint64_t seed)
{
    Instance in;
    in.config = config;
    in.seed = seed;
    in.geometry = build_scenario(config.geometry(), seed);
    in.channels = build_channels(in.geometry, config.radiation());
    in.model = config.power_model();
    return in;
}

ResultRecord make_record(const Instance& in, Architecture arch, double sweep_value, int realization,
                         const BeamformingSolution& sol)
{
    ResultRecord r;
    r.experiment = in.config.id;
    r.architecture = arch;
    r.sweep_value = sweep_value;
    r.realization = realization;
    r.seed = in.seed;
    r.total_power_W = total_power(sol, in.model, in.config.M);
    r.total_power_dBW = 10.0 * std::log10(r.total_power_W);
    r.received_power = sol.received_powers;
    r.min_received_power_W = sol.received_powers.size() ? sol.received_powers.minCoeff() : 0.0;
    r.iterations = static_cast<int>(sol.iterations.size());
    r.trace = sol.objective_trace;
    return r;
}

FailureRecord make_failure(const ExperimentConfig& config, Architecture arch, double sweep_value, int realization,
                           std::uint64_t seed, const std::string& message)
{
    return FailureRecord{config.id, arch, sweep_value, realization, seed, message};
}

BeamformingSolution solve(const Instance& in, const ArchitectureSpec& spec, const BeamformingSolution& start)
{
    return sca_optimize(spec, in.channels, start, in.model.doherty, in.config.sca_settings());
}

/// Outcome slot of one task; exactly one member is set once the task ran.
struct Slot {
    std::optional<ResultRecord> record;
    std::optional<FailureRecord> failure;
};

void collect(std::vector<Slot>& slots, ResultSet& out)
{
    for (auto& s : slots) {
        if (s.record)
            out.records.push_back(std::move(*s.record));
        if (s.failure)
            out.failures.push_back(std::move(*s.failure));
    }
}

void run_sweep(const ExperimentConfig& config, ResultSet& out)
{
    const auto points = config.sweep_points();
    const int P = static_cast<int>(points.size());
    const int R = config.realizations;
    const int A = static_cast<int>(config.architectures.size());
    std::vector<Slot> slots(static_cast<std::size_t>(P) * R * A);

    parallel_for(static_cast<int>(slots.size()), config.workers, [&](int task) {
        const int a = task % A;
        const int r = (task / A) % R;
        const int p = task / (A * R);
        const Architecture arch = config.architectures[a];
        const ExperimentConfig cfg = config.at_sweep_point(points[p]);
        const std::uint64_t seed = derive_seed(config.seed, p, r);
        const auto start = Clock::now();
        try {
            const Instance in = make_instance(cfg, seed);
            const auto spec = make_architecture(arch, cfg.M, cfg.N, in.model);
            const auto init = initialize(spec, in.channels, cfg.sca_settings().targets, in.model.doherty,
                                         cfg.init_settings());
            const auto sol = solve(in, spec, init.solution);
            auto rec = make_record(in, arch, points[p], r, sol);
            rec.wall_ms = elapsed_ms(start);
            slots[task].record = std::move(rec);
            spdlog::debug("{} {} {}={} r={} total {:.4f} W", cfg.id, to_string(arch), to_string(cfg.sweep), points[p],
                          r, slots[task].record->total_power_W);
        } catch (const std::exception& e) {
            spdlog::warn("{} {} point {} realization {} failed: {}", cfg.id, to_string(arch), points[p], r, e.what());
            slots[task].failure = make_failure(cfg, arch, points[p], r, seed, e.what());
        }
    });
    collect(slots, out);
}

void run_convergence(const ExperimentConfig& config, ResultSet& out)
{
    const int R = config.realizations;
    struct Prepared {
        std::optional<Instance> instance;
        std::optional<InitialPoint> init;
        std::string error;
    };
    std::vector<Prepared> prepared(R);
    parallel_for(R, config.workers, [&](int r) {
        try {
            Instance in = make_instance(config, derive_seed(config.seed, 0, r));
            const auto spec = make_architecture(Architecture::Its, config.M, config.N, in.model);
            prepared[r].init = init_its(spec, in.channels, config.sca_settings().targets, in.model.doherty,
                                        config.init_settings());
            prepared[r].instance = std::move(in);
        } catch (const std::exception& e) {
            prepared[r].error = e.what();
        }
    });

    struct Job {
        int realization;
        int index;
    };
    std::vector<Job> jobs;
    for (int r = 0; r < R; ++r) {
        const auto seed = derive_seed(config.seed, 0, r);
        if (!prepared[r].init) {
            out.failures.push_back(make_failure(config, Architecture::Its, 0.0, r, seed, prepared[r].error));
            continue;
        }
        const auto& init = *prepared[r].init;
        for (std::size_t i = 0; i < init.diagnostics.size(); ++i) {
            const auto& d = init.diagnostics[i];
            out.starts.push_back(StartRecord{r, static_cast<int>(i), d.assignment, d.feasible, d.score,
                                             d.assignment == init.assignment});
            if (d.feasible)
                jobs.push_back(Job{r, static_cast<int>(i)});
        }
    }

    std::vector<Slot> slots(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), config.workers, [&](int j) {
        const auto& job = jobs[j];
        const auto& in = *prepared[job.realization].instance;
        const auto& init = *prepared[job.realization].init;
        const auto& diag = init.diagnostics[job.index];
        const auto start = Clock::now();
        try {
            const auto spec = make_architecture(Architecture::Its, config.M, config.N, in.model);
            const auto ip = evaluate_assignment(spec, in.channels, config.sca_settings().targets, in.model.doherty,
                                                init.partition, diag.assignment);
            const auto sol = solve(in, spec, ip.solution);
            auto rec = make_record(in, Architecture::Its, job.index, job.realization, sol);
            rec.wall_ms = elapsed_ms(start);
            slots[j].record = std::move(rec);
        } catch (const std::exception& e) {
            slots[j].failure = make_failure(config, Architecture::Its, job.index, job.realization, in.seed, e.what());
        }
    });
    collect(slots, out);
}

/// Single-chain beacon with every ITS element phase-aligned to the device and
/// the smallest precoder meeting the target.
BeamformingSolution conjugate_focus(const Instance& in, const ArchitectureSpec& spec)
{
    const int M = in.channels.elements();
    const std::vector<std::vector<int>> partition{[&] {
        std::vector<int> all(M);
        for (int m = 0; m < M; ++m)
            all[m] = m;
        return all;
    }()};
    BeamformingSolution sol;
    sol.architecture = Architecture::Its;
    sol.analog = init_phases(partition, {0}, in.channels.A, in.channels.H);
    const cvec heff = effective_channel(in.channels.H[0], sol.analog, in.channels.A);
    const double g = in.model.doherty.gain;
    const double amplitude = std::sqrt(in.config.P_th / (g * spec.loss_factor * heff.squaredNorm()));
    sol.precoders = {cvec::Constant(1, amplitude)};
    sol.chain_powers = chain_output_powers(sol.precoders, g);
    if (sol.chain_powers(0) > in.model.doherty.max_output)
        throw InfeasibleAnchorError("conjugate focus needs more than P_max");
    sol.received_powers = received_power(spec, sol, in.channels, g);
    sol.objective_trace = {hpa_power(sol.chain_powers, in.model.doherty)};
    sol.converged = true;
    return sol;
}

std::vector<cvec> radiated_fields(const BeamformingSolution& sol, const ChannelSet& channels)
{
    std::vector<cvec> out;
    for (const auto& b : sol.precoders)
        out.push_back(channels.A * b);
    return out;
}

PowerMap its_map(const Instance& in, const BeamformingSolution& sol, double sweep_value, int realization)
{
    PowerMap map{"its", sweep_value, realization, {}, {}, {}};
    const auto incident = radiated_fields(sol, in.channels);
    for (int m = 0; m < in.channels.elements(); ++m) {
        double p = 0.0;
        for (const auto& v : incident)
            p += std::norm(v(m));
        map.x.push_back(in.geometry.its.positions[m].x());
        map.y.push_back(in.geometry.its.positions[m].y());
        map.power.push_back(in.model.doherty.gain * p);
    }
    return map;
}

PowerMap device_map(const Instance& in, const ArchitectureSpec& spec, const BeamformingSolution& sol,
                    double sweep_value, int realization)
{
    PowerMap map{"device", sweep_value, realization, {}, {}, {}};
    std::vector<cvec> refracted = radiated_fields(sol, in.channels);
    for (auto& v : refracted)
        v = sol.analog.cwiseProduct(v);
    const int n = in.config.map_points;
    const double extent = in.config.map_extent;
    const auto rad = in.config.radiation();
    const double scale = in.model.doherty.gain * spec.loss_factor;
    for (int j = 0; j < n; ++j) {
        const double y = -extent / 2.0 + extent * j / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double x = -extent / 2.0 + extent * i / (n - 1);
            const cvec h = its_to_point_channel(in.geometry.its, Vec3(x, y, -in.config.device_distance), rad);
            double p = 0.0;
            for (const auto& v : refracted)
                p += std::norm(h.dot(v));
            map.x.push_back(x);
            map.y.push_back(y);
            map.power.push_back(scale * p);
        }
    }
    return map;
}

void run_near_field(const ExperimentConfig& config, ResultSet& out)
{
    const auto points = config.sweep_points();
    const int P = static_cast<int>(points.size());
    const int R = config.realizations;
    std::vector<Slot> slots(static_cast<std::size_t>(P) * R);
    std::vector<std::vector<PowerMap>> maps(slots.size());

    parallel_for(static_cast<int>(slots.size()), config.workers, [&](int task) {
        const int r = task % R;
        const int p = task / R;
        const ExperimentConfig cfg = config.at_sweep_point(points[p]);
        const std::uint64_t seed = derive_seed(config.seed, p, r);
        const auto start = Clock::now();
        try {
            const Instance in = make_instance(cfg, seed);
            const auto spec = make_architecture(Architecture::Its, cfg.M, cfg.N, in.model);
            BeamformingSolution sol;
            if (cfg.focus == FocusMode::Conjugate) {
                sol = conjugate_focus(in, spec);
            } else {
                const auto init = initialize(spec, in.channels, cfg.sca_settings().targets, in.model.doherty,
                                             cfg.init_settings());
                sol = solve(in, spec, init.solution);
            }
            maps[task].push_back(its_map(in, sol, points[p], r));
            maps[task].push_back(device_map(in, spec, sol, points[p], r));
            auto rec = make_record(in, Architecture::Its, points[p], r, sol);
            rec.wall_ms = elapsed_ms(start);
            slots[task].record = std::move(rec);
        } catch (const std::exception& e) {
            slots[task].failure = make_failure(cfg, Architecture::Its, points[p], r, seed, e.what());
        }
    });
    collect(slots, out);

    std::map<std::string, double> peak;
    for (const auto& group : maps)
        for (const auto& m : group)
            for (double v : m.power)
                peak[m.plane] = std::max(peak[m.plane], v);
    for (auto& group : maps)
        for (auto& m : group) {
            const double norm = peak[m.plane];
            if (norm > 0.0)
                for (double& v : m.power)
                    v /= norm;
            out.maps.push_back(std::move(m));
        }
}

} // namespace

void parallel_for(int count, int workers, const std::function<void(int)>& task)
{
    const int threads = std::max(1, std::min(workers, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count && !failed; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<Aggregate> aggregate(const std::vector<ResultRecord>& records, const std::vector<FailureRecord>& failures)
{
    struct Acc {
        Aggregate agg;
        std::vector<double> values;
        double iterations = 0.0;
    };
    std::vector<Acc> cells;
    auto cell = [&](const std::string& exp, Architecture arch, double value) -> Acc& {
        for (auto& c : cells)
            if (c.agg.experiment == exp && c.agg.architecture == arch && c.agg.sweep_value == value)
                return c;
        Acc c;
        c.agg.experiment = exp;
        c.agg.architecture = arch;
        c.agg.sweep_value = value;
        cells.push_back(c);
        return cells.back();
    };
    for (const auto& r : records) {
        auto& c = cell(r.experiment, r.architecture, r.sweep_value);
        c.values.push_back(r.total_power_W);
        c.iterations += r.iterations;
    }
    for (const auto& f : failures)
        ++cell(f.experiment, f.architecture, f.sweep_value).agg.failures;

    std::vector<Aggregate> out;
    for (auto& c : cells) {
        Aggregate a = c.agg;
        a.count = static_cast<int>(c.values.size());
        if (a.count > 0) {
            double sum = 0.0;
            for (double v : c.values)
                sum += v;
            a.mean_W = sum / a.count;
            double ss = 0.0;
            for (double v : c.values)
                ss += (v - a.mean_W) * (v - a.mean_W);
            a.std_W = a.count > 1 ? std::sqrt(ss / (a.count - 1)) : 0.0;
            a.mean_dBW = 10.0 * std::log10(a.mean_W);
            a.mean_iterations = c.iterations / a.count;
        } else {
            a.mean_W = a.std_W = a.mean_dBW = a.mean_iterations = std::nan("");
        }
        out.push_back(a);
    }
    return out;
}

double focal_spot_area(const PowerMap& map, double drop_db)
{
    if (map.power.empty())
        throw ShapeError("empty power map");
    auto spacing = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v.size() > 1 ? (v.back() - v.front()) / (v.size() - 1) : 0.0;
    };
    const double cell = spacing(map.x) * spacing(map.y);
    const double peak = *std::max_element(map.power.begin(), map.power.end());
    const double floor = peak * std::pow(10.0, -drop_db / 10.0);
    int count = 0;
    for (double v : map.power)
        if (v >= floor)
            ++count;
    return count * cell;
}

ResultSet run_experiment(const ExperimentConfig& config)
{
    config.validate();
    ResultSet out;
    out.config = config;
    switch (config.kind) {
    case ExperimentKind::Sweep:
        run_sweep(config, out);
        break;
    case ExperimentKind::Convergence:
        run_convergence(config, out);
        break;
    case ExperimentKind::NearField:
        run_near_field(config, out);
        break;
    }
    out.aggregates = aggregate(out.records, out.failures);
    for (const auto& a : out.aggregates) {
        const int total = a.count + a.failures;
        if (total > 0 && static_cast<double>(a.failures) / total > kMaxFailureFraction)
            out.failed_cells.push_back(std::string(to_string(a.architecture)) + " at " + to_string(config.sweep) +
                                       "=" + std::to_string(a.sweep_value) + ": " + std::to_string(a.failures) +
                                       "/" + std::to_string(total) + " failed");
    }
    return out;
}

} // namespace wetbeam::harness
