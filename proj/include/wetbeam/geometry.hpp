// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wetbeam {

// Coordinate convention: the ITS occupies the z = 0 plane, the feeder sits at
// z = +d_f and the devices at z = -d_z.

/// Passive surface: a centered rectangular grid with spacing `spacing` along x and y.
struct ItsLayout {
    double spacing = 0.0;
    std::vector<Vec3> positions;
    Vec3 tx_boresight{0.0, 0.0, -1.0}; ///< transmit side, facing the devices
    Vec3 rx_boresight{0.0, 0.0, 1.0};  ///< receive side, facing the feeder

    int size() const { return static_cast<int>(positions.size()); }
};

/// Feeder antennas on the vertices of a regular polygon, all aimed at the ITS center.
struct FeederLayout {
    double circumradius = 0.0;
    double distance = 0.0;
    std::vector<Vec3> positions;
    std::vector<Vec3> boresights;

    int size() const { return static_cast<int>(positions.size()); }
};

struct DeviceDeployment {
    double area_x = 0.0;
    double area_y = 0.0;
    double distance = 0.0;
    std::vector<Vec3> positions;

    int size() const { return static_cast<int>(positions.size()); }
};

struct ScenarioGeometry {
    ItsLayout its;
    FeederLayout feeder;
    DeviceDeployment devices;
};

/// Everything needed to place the three node sets.
struct GeometryParams {
    int its_elements = 100;
    int feeder_antennas = 4;
    int devices = 4;
    double spacing = 0.03;
    double circumradius = 0.0;
    double feeder_distance = 0.17;
    double area_x = 3.0;
    double area_y = 3.0;
    double area_distance = 5.0;
    /// Overrides random deployment when set (used by the near-field map experiment).
    std::optional<std::vector<Vec3>> fixed_devices;
};

/// lambda / (2 sin(pi / N)); zero for a single antenna.
double default_circumradius(int antennas, double wavelength);

/// (lambda / 2) sqrt(M / pi): radius of the disk with the ITS area.
double default_feeder_distance(int elements, double wavelength);

/// ceil(sqrt(M)) columns, row-major, truncated to M and re-centered on the origin.
ItsLayout make_its_layout(int elements, double spacing);

FeederLayout make_feeder_layout(int antennas, double circumradius, double distance);

DeviceDeployment deploy_devices(int devices, double area_x, double area_y, double distance, std::uint64_t seed);

/// Deterministic for a fixed seed. Throws ConfigError on non-positive dimensions.
ScenarioGeometry build_scenario(const GeometryParams& params, std::uint64_t seed);

/// Angle in [0, pi] between `boresight` and the direction from `source` to `target`.
/// Throws DegenerateGeometryError when the points coincide.
double boresight_angle(const Vec3& source, const Vec3& boresight, const Vec3& target);

} // namespace wetbeam
