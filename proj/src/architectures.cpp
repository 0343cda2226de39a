// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/architectures.hpp"

#include "wetbeam/errors.hpp"

#include <cmath>
#include <string>

namespace wetbeam {

int ArchitectureSpec::analog_size() const
{
    switch (analog) {
    case AnalogKind::None:
        return 0;
    case AnalogKind::Phases:
        return elements;
    case AnalogKind::FullMatrix:
        return elements * chains;
    case AnalogKind::BlockDiagonal:
        return chains * block;
    }
    return 0;
}

ArchitectureSpec make_architecture(Architecture tag, int elements, int chains, const PowerModel& model)
{
    if (elements < 1 || chains < 1)
        throw UnsupportedConfigurationError("architecture needs M >= 1 and N >= 1");
    ArchitectureSpec spec;
    spec.tag = tag;
    spec.elements = elements;
    switch (tag) {
    case Architecture::Its:
        spec.analog = AnalogKind::Phases;
        spec.chains = chains;
        spec.modulus = 1.0;
        spec.loss_factor = model.its_efficiency;
        spec.its_static = true;
        spec.counts = {chains, 0, elements, 0};
        break;
    case Architecture::FullyDigital:
        spec.analog = AnalogKind::None;
        spec.chains = elements;
        spec.modulus = 0.0;
        spec.loss_factor = 1.0;
        spec.counts = {elements, 0, 0, 0};
        break;
    case Architecture::HybridFull: {
        if (elements < chains)
            throw UnsupportedConfigurationError("HBFC needs M >= N");
        const auto loss = insertion_loss(HybridKind::FullyConnected, elements, chains, model.splitter_db,
                                         model.combiner_db, model.shifter_db);
        spec.analog = AnalogKind::FullMatrix;
        spec.chains = chains;
        spec.modulus = 1.0 / std::sqrt(static_cast<double>(elements));
        spec.loss_factor = 1.0 / loss.factor;
        spec.insertion_db = loss.total_db;
        spec.counts = {chains, chains, elements * chains, chains};
        break;
    }
    case Architecture::HybridPartial: {
        if (elements < chains)
            throw UnsupportedConfigurationError("HBPC needs M >= N");
        const auto loss = insertion_loss(HybridKind::PartiallyConnected, elements, chains, model.splitter_db,
                                         model.combiner_db, model.shifter_db);
        spec.analog = AnalogKind::BlockDiagonal;
        spec.chains = chains;
        spec.block = elements / chains;
        spec.modulus = 1.0 / std::sqrt(static_cast<double>(spec.block));
        spec.loss_factor = 1.0 / loss.factor;
        spec.insertion_db = loss.total_db;
        spec.counts = {chains, chains, elements, 0};
        break;
    }
    }
    return spec;
}

int effective_antenna_count(Architecture tag, int elements, int chains)
{
    if (tag == Architecture::HybridPartial) {
        if (chains < 1)
            throw UnsupportedConfigurationError("HBPC needs N >= 1");
        return chains * (elements / chains);
    }
    return elements;
}

cmat analog_matrix(const ArchitectureSpec& spec, const cvec& analog)
{
    if (analog.size() != spec.analog_size())
        throw ShapeError("analog vector has the wrong length");
    cmat C = cmat::Zero(spec.elements, spec.chains);
    if (spec.analog == AnalogKind::FullMatrix) {
        for (int n = 0; n < spec.chains; ++n)
            C.col(n) = analog.segment(static_cast<Eigen::Index>(n) * spec.elements, spec.elements);
    } else if (spec.analog == AnalogKind::BlockDiagonal) {
        for (int n = 0; n < spec.chains; ++n)
            C.col(n).segment(n * spec.block, spec.block) = analog.segment(n * spec.block, spec.block);
    } else {
        throw UnsupportedConfigurationError("analog matrix exists only for hybrid designs");
    }
    return C;
}

cvec EffectiveChannelMap::evaluate(const cvec& analog) const
{
    cvec h = constant;
    for (std::size_t n = 0; n < terms.size(); ++n)
        for (const auto& [j, coeff] : terms[n]) {
            if (j >= analog.size())
                throw ShapeError("analog vector too short for the channel map");
            h(static_cast<Eigen::Index>(n)) += coeff * std::conj(analog(j));
        }
    return h;
}

EffectiveChannelMap effective_channel_map(const ArchitectureSpec& spec, const ChannelSet& channels, int device)
{
    if (device < 0 || device >= channels.devices())
        throw ShapeError("device index out of range");
    const cvec& h = channels.H[device];
    if (h.size() < spec.elements)
        throw ShapeError("device channel shorter than the array");
    EffectiveChannelMap map;
    map.terms.resize(spec.chains);
    map.constant = cvec::Zero(spec.chains);
    switch (spec.analog) {
    case AnalogKind::None:
        map.constant = h.head(spec.elements);
        break;
    case AnalogKind::Phases:
        // h_eff = A^H (conj(phi) o h)
        if (channels.A.rows() != spec.elements || channels.A.cols() != spec.chains)
            throw ShapeError("feeder channel does not match the ITS design");
        for (int n = 0; n < spec.chains; ++n)
            for (int m = 0; m < spec.elements; ++m)
                map.terms[n].emplace_back(m, std::conj(channels.A(m, n)) * h(m));
        break;
    case AnalogKind::FullMatrix:
        for (int n = 0; n < spec.chains; ++n)
            for (int m = 0; m < spec.elements; ++m)
                map.terms[n].emplace_back(n * spec.elements + m, h(m));
        break;
    case AnalogKind::BlockDiagonal:
        for (int n = 0; n < spec.chains; ++n)
            for (int l = 0; l < spec.block; ++l)
                map.terms[n].emplace_back(n * spec.block + l, h(n * spec.block + l));
        break;
    }
    return map;
}

std::vector<cvec> effective_channels(const ArchitectureSpec& spec, const ChannelSet& channels, const cvec& analog)
{
    if (analog.size() != spec.analog_size())
        throw ShapeError("analog vector has the wrong length");
    std::vector<cvec> out;
    out.reserve(channels.H.size());
    for (int k = 0; k < channels.devices(); ++k) {
        const cvec& h = channels.H[k];
        switch (spec.analog) {
        case AnalogKind::None:
            out.push_back(h.head(spec.elements));
            break;
        case AnalogKind::Phases:
            out.push_back(effective_channel(h, analog, channels.A));
            break;
        default:
            out.push_back(analog_matrix(spec, analog).adjoint() * h.head(spec.elements));
            break;
        }
    }
    return out;
}

rvec received_power(const ArchitectureSpec& spec, const BeamformingSolution& solution, const ChannelSet& channels,
                    double gain)
{
    const auto heff = effective_channels(spec, channels, solution.analog);
    rvec p = rvec::Zero(channels.devices());
    for (int k = 0; k < channels.devices(); ++k)
        for (const auto& b : solution.precoders) {
            if (b.size() != spec.chains)
                throw ShapeError("precoder length " + std::to_string(b.size()) + " does not match the chain count");
            p(k) += std::norm(heff[k].dot(b));
        }
    return gain * spec.loss_factor * p;
}

} // namespace wetbeam
