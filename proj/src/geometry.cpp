// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/geometry.hpp"

#include "wetbeam/errors.hpp"
#include "wetbeam/rng.hpp"

#include <cmath>
#include <random>
#include <string>

namespace wetbeam {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(name) + " must be positive and finite");
}

} // namespace

double default_circumradius(int antennas, double wavelength)
{
    if (antennas <= 1)
        return 0.0;
    return wavelength / (2.0 * std::sin(kPi / antennas));
}

double default_feeder_distance(int elements, double wavelength)
{
    return 0.5 * wavelength * std::sqrt(static_cast<double>(elements) / kPi);
}

ItsLayout make_its_layout(int elements, double spacing)
{
    if (elements < 1)
        throw ConfigError("ITS element count must be at least 1");
    require_positive(spacing, "ITS spacing");

    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(elements)) - 1e-12));
    ItsLayout layout;
    layout.spacing = spacing;
    layout.positions.reserve(elements);
    Vec3 centroid = Vec3::Zero();
    for (int i = 0; i < elements; ++i) {
        Vec3 p(spacing * (i % cols), spacing * (i / cols), 0.0);
        layout.positions.push_back(p);
        centroid += p;
    }
    centroid /= elements;
    for (auto& p : layout.positions)
        p -= centroid;
    return layout;
}

FeederLayout make_feeder_layout(int antennas, double circumradius, double distance)
{
    if (antennas < 1)
        throw ConfigError("feeder antenna count must be at least 1");
    if (!(circumradius >= 0.0) || !std::isfinite(circumradius))
        throw ConfigError("feeder circumradius must be non-negative");
    require_positive(distance, "feeder distance");

    FeederLayout layout;
    layout.circumradius = antennas == 1 ? 0.0 : circumradius;
    layout.distance = distance;
    for (int n = 0; n < antennas; ++n) {
        const double angle = 2.0 * kPi * n / antennas;
        Vec3 p(layout.circumradius * std::cos(angle), layout.circumradius * std::sin(angle), distance);
        layout.positions.push_back(p);
        layout.boresights.push_back((-p).normalized());
    }
    return layout;
}

DeviceDeployment deploy_devices(int devices, double area_x, double area_y, double distance, std::uint64_t seed)
{
    if (devices < 1)
        throw ConfigError("device count must be at least 1");
    require_positive(area_x, "service area d_x");
    require_positive(area_y, "service area d_y");
    require_positive(distance, "service area distance d_z");

    DeviceDeployment deployment;
    deployment.area_x = area_x;
    deployment.area_y = area_y;
    deployment.distance = distance;
    std::mt19937_64 gen(seed);
    for (int k = 0; k < devices; ++k) {
        const double x = (uniform01(gen) - 0.5) * area_x;
        const double y = (uniform01(gen) - 0.5) * area_y;
        deployment.positions.emplace_back(x, y, -distance);
    }
    return deployment;
}

ScenarioGeometry build_scenario(const GeometryParams& params, std::uint64_t seed)
{
    ScenarioGeometry geom;
    geom.its = make_its_layout(params.its_elements, params.spacing);
    geom.feeder = make_feeder_layout(params.feeder_antennas, params.circumradius, params.feeder_distance);
    if (params.fixed_devices) {
        if (params.fixed_devices->empty())
            throw ConfigError("fixed device list is empty");
        geom.devices.area_x = params.area_x;
        geom.devices.area_y = params.area_y;
        geom.devices.distance = params.area_distance;
        for (const auto& p : *params.fixed_devices) {
            if (!p.allFinite() || !(p.z() < 0.0))
                throw ConfigError("fixed devices must lie in front of the transmitting side (z < 0)");
            geom.devices.positions.push_back(p);
        }
    } else {
        geom.devices = deploy_devices(params.devices, params.area_x, params.area_y, params.area_distance, seed);
    }
    return geom;
}

double boresight_angle(const Vec3& source, const Vec3& boresight, const Vec3& target)
{
    const Vec3 d = target - source;
    const double dist = d.norm();
    if (!(dist > 0.0))
        throw DegenerateGeometryError("boresight angle between coincident points");
    if (std::abs(boresight.norm() - 1.0) > 1e-12)
        throw ParameterError("boresight vector must have unit norm");
    // atan2 form keeps full precision near 0 and pi where acos loses digits.
    return std::atan2(boresight.cross(d).norm(), boresight.dot(d));
}

} // namespace wetbeam
