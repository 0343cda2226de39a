// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/power.hpp"

#include "wetbeam/errors.hpp"

#include <cmath>
#include <string>

namespace wetbeam {

namespace {

int ceil_log2(int value)
{
    int stages = 0;
    while ((1 << stages) < value)
        ++stages;
    return stages;
}

} // namespace

std::string_view to_string(Architecture arch)
{
    switch (arch) {
    case Architecture::Its:
        return "ITS";
    case Architecture::FullyDigital:
        return "FD";
    case Architecture::HybridFull:
        return "HBFC";
    case Architecture::HybridPartial:
        return "HBPC";
    }
    return "?";
}

Architecture architecture_from_string(std::string_view name)
{
    if (name == "ITS" || name == "its")
        return Architecture::Its;
    if (name == "FD" || name == "fd")
        return Architecture::FullyDigital;
    if (name == "HBFC" || name == "hbfc")
        return Architecture::HybridFull;
    if (name == "HBPC" || name == "hbpc")
        return Architecture::HybridPartial;
    throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

void DohertyParams::validate() const
{
    if (ways < 1)
        throw ParameterError("Doherty way count must be >= 1");
    if (!(peak_efficiency > 0.0 && peak_efficiency <= 1.0))
        throw ParameterError("peak drain efficiency must lie in (0, 1]");
    if (!(max_output > 0.0))
        throw ParameterError("maximum output power must be positive");
    if (!(gain > 0.0))
        throw ParameterError("HPA gain must be positive");
}

double hpa_output_power(std::span<const cvec> precoders, int chain, double gain)
{
    double sum = 0.0;
    for (const auto& b : precoders) {
        if (chain < 0 || chain >= b.size())
            throw ShapeError("chain index " + std::to_string(chain) + " out of range");
        sum += std::norm(b(chain));
    }
    if (precoders.empty() && chain < 0)
        throw ShapeError("chain index out of range");
    return gain * sum;
}

rvec chain_output_powers(std::span<const cvec> precoders, double gain)
{
    if (precoders.empty())
        return rvec();
    rvec p = rvec::Zero(precoders.front().size());
    for (const auto& b : precoders) {
        if (b.size() != p.size())
            throw ShapeError("precoders must share one length");
        p += b.cwiseAbs2();
    }
    return gain * p;
}

double doherty_consumption(double output, const DohertyParams& params)
{
    params.validate();
    if (output < 0.0)
        throw ParameterError("negative HPA output power");
    if (output > params.max_output)
        throw SaturationError("HPA output " + std::to_string(output) + " W exceeds P_max");
    if (output == 0.0)
        return 0.0;
    const double l = params.ways;
    const double root = std::sqrt(output * params.max_output);
    if (output <= params.backoff())
        return root / (l * params.peak_efficiency);
    return ((l + 1.0) * root - params.max_output) / (l * params.peak_efficiency);
}

double drain_efficiency(double output, const DohertyParams& params)
{
    if (output == 0.0)
        throw UndefinedEfficiencyError("drain efficiency is undefined at zero output");
    return output / doherty_consumption(output, params);
}

InsertionLoss insertion_loss(HybridKind kind, int elements, int chains, double splitter_db, double combiner_db,
                             double shifter_db)
{
    if (chains < 1 || elements < chains)
        throw ConfigError("insertion loss requires M >= N >= 1");
    InsertionLoss loss{splitter_db, combiner_db, shifter_db, 0.0, 1.0};
    if (kind == HybridKind::FullyConnected) {
        loss.total_db = ceil_log2(elements) * splitter_db + ceil_log2(chains) * combiner_db + shifter_db;
    } else {
        const int subarray = elements / chains;
        loss.total_db = ceil_log2(subarray) * splitter_db + shifter_db;
    }
    loss.factor = std::pow(10.0, loss.total_db / 10.0);
    return loss;
}

double hpa_power(const rvec& chain_powers, const DohertyParams& params)
{
    double sum = 0.0;
    for (double p : chain_powers)
        sum += doherty_consumption(p, params);
    return sum;
}

double total_power(const BeamformingSolution& solution, const PowerModel& model, int elements)
{
    const rvec powers = chain_output_powers(solution.precoders, model.doherty.gain);
    double total = model.statics.baseband + model.statics.transceiver + hpa_power(powers, model.doherty);
    if (solution.architecture == Architecture::Its)
        total += model.its.control + elements * model.its.per_cell;
    return total;
}

} // namespace wetbeam
