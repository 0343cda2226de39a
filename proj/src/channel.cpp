// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/channel.hpp"

#include "wetbeam/errors.hpp"

#include <cmath>

namespace wetbeam {

void RadiationParams::validate() const
{
    if (!(its_gain >= 2.0))
        throw ParameterError("ITS element boresight gain kappa must be >= 2");
    if (!(feeder_gain >= 2.0))
        throw ParameterError("feeder boresight gain mu must be >= 2");
    if (!(wavelength > 0.0))
        throw ParameterError("wavelength must be positive");
}

double radiation_profile(double angle, double gain)
{
    if (!(gain >= 2.0))
        throw ParameterError("radiation profile gain must be >= 2");
    if (angle < 0.0 || angle > 0.5 * kPi)
        return 0.0;
    return 2.0 * (gain + 1.0) * std::pow(std::cos(angle), gain);
}

cdouble free_space_coefficient(double distance, double amplitude_gain, double wavelength)
{
    if (!(distance > 0.0))
        throw DegenerateGeometryError("zero propagation distance");
    const double magnitude = amplitude_gain * wavelength / (4.0 * kPi * distance);
    return std::polar(magnitude, -2.0 * kPi * distance / wavelength);
}

cmat feeder_to_its_matrix(const ScenarioGeometry& geom, const RadiationParams& params)
{
    params.validate();
    const auto& its = geom.its;
    const auto& feeder = geom.feeder;
    cmat A(its.size(), feeder.size());
    for (int n = 0; n < feeder.size(); ++n) {
        for (int m = 0; m < its.size(); ++m) {
            const double d = (feeder.positions[n] - its.positions[m]).norm();
            const double theta = boresight_angle(feeder.positions[n], feeder.boresights[n], its.positions[m]);
            const double vartheta = boresight_angle(its.positions[m], its.rx_boresight, feeder.positions[n]);
            const double gain =
                std::sqrt(radiation_profile(theta, params.feeder_gain) * radiation_profile(vartheta, params.its_gain));
            A(m, n) = free_space_coefficient(d, gain, params.wavelength);
        }
    }
    return A;
}

cvec its_to_point_channel(const ItsLayout& its, const Vec3& point, const RadiationParams& params)
{
    cvec h(its.size());
    for (int m = 0; m < its.size(); ++m) {
        const double d = (point - its.positions[m]).norm();
        const double zeta = boresight_angle(its.positions[m], its.tx_boresight, point);
        h(m) = free_space_coefficient(d, std::sqrt(radiation_profile(zeta, params.its_gain)), params.wavelength);
    }
    return h;
}

std::vector<cvec> its_to_device_matrix(const ScenarioGeometry& geom, const RadiationParams& params)
{
    params.validate();
    std::vector<cvec> H;
    H.reserve(geom.devices.positions.size());
    for (const auto& u : geom.devices.positions)
        H.push_back(its_to_point_channel(geom.its, u, params));
    return H;
}

ChannelSet build_channels(const ScenarioGeometry& geom, const RadiationParams& params)
{
    return ChannelSet{feeder_to_its_matrix(geom, params), its_to_device_matrix(geom, params)};
}

cvec effective_channel(const cvec& h, const cvec& phi, const cmat& A)
{
    if (h.size() != A.rows() || phi.size() != A.rows())
        throw ShapeError("effective_channel: h, phi and A rows must agree");
    // (h^H diag(phi) A)^H = A^H diag(conj(phi)) h
    const cvec weighted = phi.conjugate().cwiseProduct(h);
    return A.adjoint() * weighted;
}

rvec captured_power_fraction(const cmat& A)
{
    return A.cwiseAbs2().colwise().sum().transpose();
}

} // namespace wetbeam
