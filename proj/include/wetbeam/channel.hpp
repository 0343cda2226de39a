// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/geometry.hpp"
#include "wetbeam/types.hpp"

#include <vector>

namespace wetbeam {

inline constexpr double kSpeedOfLight = 2.998e8;

inline double wavelength_from_frequency(double frequency_hz)
{
    return kSpeedOfLight / frequency_hz;
}

/// Boresight gains (both >= 2) and the carrier wavelength.
struct RadiationParams {
    double its_gain = 2.0;     ///< kappa
    double feeder_gain = 10.0; ///< mu
    double wavelength = 0.06;

    void validate() const;
};

/// Line-of-sight channels of one deployment.
struct ChannelSet {
    cmat A;              ///< M x N, A(m, n) couples feeder antenna n to ITS element m
    std::vector<cvec> H; ///< K vectors of length M, ITS element m to device k

    int elements() const { return static_cast<int>(A.rows()); }
    int antennas() const { return static_cast<int>(A.cols()); }
    int devices() const { return static_cast<int>(H.size()); }
};

/// 2 (xi + 1) cos^xi(beta) on [0, pi/2], zero elsewhere. Throws ParameterError for xi < 2.
double radiation_profile(double angle, double gain);

/// Free-space coefficient sqrt(gain) * lambda * exp(-2 pi j d / lambda) / (4 pi d).
cdouble free_space_coefficient(double distance, double amplitude_gain, double wavelength);

cmat feeder_to_its_matrix(const ScenarioGeometry& geom, const RadiationParams& params);

/// Device antennas are isotropic; only the ITS transmit-side profile applies.
std::vector<cvec> its_to_device_matrix(const ScenarioGeometry& geom, const RadiationParams& params);

/// Channel from every ITS element to an arbitrary point on the transmit side.
cvec its_to_point_channel(const ItsLayout& its, const Vec3& point, const RadiationParams& params);

ChannelSet build_channels(const ScenarioGeometry& geom, const RadiationParams& params);

/// Returns h_eff with h_eff^H = h^H diag(phi) A.
cvec effective_channel(const cvec& h, const cvec& phi, const cmat& A);

/// Sum over ITS elements of |a_{n,m}|^2 per feeder antenna. Reporting only; spillover
/// is already part of A.
rvec captured_power_fraction(const cmat& A);

} // namespace wetbeam
