// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/errors.hpp"
#include "wetbeam/geometry.hpp"
#include "wetbeam/rng.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <random>

using namespace wetbeam;
using Catch::Approx;

TEST_CASE("four-element grid sits at the corners of a centered square")
{
    const auto its = make_its_layout(4, 0.03);
    REQUIRE(its.size() == 4);
    int hits = 0;
    for (const auto& p : its.positions) {
        CHECK(std::abs(std::abs(p.x()) - 0.015) < 1e-15);
        CHECK(std::abs(std::abs(p.y()) - 0.015) < 1e-15);
        CHECK(p.z() == 0.0);
        ++hits;
    }
    CHECK(hits == 4);
    // all four sign combinations present
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) {
            bool found = false;
            for (const auto& p : its.positions)
                found |= (p.x() * sx > 0 && p.y() * sy > 0);
            CHECK(found);
        }
}

TEST_CASE("grid centroid is the origin for square and ragged counts")
{
    for (int M : {1, 2, 7, 10, 36, 100, 102, 400}) {
        const auto its = make_its_layout(M, 0.03);
        REQUIRE(its.size() == M);
        Vec3 c = Vec3::Zero();
        for (const auto& p : its.positions)
            c += p;
        c /= M;
        CHECK(c.norm() < 1e-12);
    }
}

TEST_CASE("perfect-square counts give a sqrt(M) by sqrt(M) grid with the requested pitch")
{
    const auto its = make_its_layout(100, 0.03);
    std::vector<double> xs, ys;
    for (const auto& p : its.positions) {
        xs.push_back(std::round(p.x() / 0.03 * 2.0));
        ys.push_back(std::round(p.y() / 0.03 * 2.0));
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    CHECK(xs.size() == 10);
    CHECK(ys.size() == 10);
    const double width = its.positions.back().x() - its.positions.front().x();
    CHECK(width == Approx(9 * 0.03).margin(1e-12));
    // ragged: ceil(sqrt(10)) = 4 columns
    const auto ragged = make_its_layout(10, 1.0);
    double max_x = -1e9, min_x = 1e9;
    for (const auto& p : ragged.positions) {
        max_x = std::max(max_x, p.x());
        min_x = std::min(min_x, p.x());
    }
    CHECK(max_x - min_x == Approx(3.0));
}

TEST_CASE("circumradius for four antennas at 6 cm wavelength")
{
    // lambda / (2 sin(pi/4)) = 0.06 / sqrt(2)
    CHECK(default_circumradius(4, 0.06) == Approx(0.06 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(default_circumradius(4, 0.06) == Approx(0.04243).margin(5e-6));
    CHECK(default_circumradius(1, 0.06) == 0.0);
}

TEST_CASE("feeder vertices lie on the circumcircle and aim at the ITS center")
{
    for (int N : {1, 2, 3, 4, 7}) {
        const double r = default_circumradius(N, 0.06);
        const auto f = make_feeder_layout(N, r, 0.17);
        REQUIRE(f.size() == N);
        for (int n = 0; n < N; ++n) {
            const Vec3 center(0.0, 0.0, 0.17);
            CHECK(std::abs((f.positions[n] - center).norm() - r) < 1e-12);
            CHECK(f.positions[n].z() == 0.17);
            const double angle = boresight_angle(f.positions[n], f.boresights[n], Vec3::Zero());
            CHECK(angle < 1e-12);
        }
    }
    // a single antenna is on the axis
    const auto one = make_feeder_layout(1, 0.5, 1.0);
    CHECK(one.positions[0].head<2>().norm() == 0.0);
}

TEST_CASE("devices stay inside the service rectangle and repeat for a seed")
{
    GeometryParams p;
    p.its_elements = 16;
    p.devices = 50;
    p.area_x = 3.0;
    p.area_y = 2.0;
    p.area_distance = 5.0;
    const auto a = build_scenario(p, 42);
    const auto b = build_scenario(p, 42);
    const auto c = build_scenario(p, 43);
    REQUIRE(a.devices.size() == 50);
    bool differs = false;
    for (int k = 0; k < 50; ++k) {
        const auto& u = a.devices.positions[k];
        CHECK(std::abs(u.x()) <= 1.5);
        CHECK(std::abs(u.y()) <= 1.0);
        CHECK(u.z() == -5.0);
        CHECK(u == b.devices.positions[k]);
        differs |= (u != c.devices.positions[k]);
    }
    CHECK(differs);
    // feeder and devices on opposite sides of the ITS plane
    for (const auto& v : a.feeder.positions)
        CHECK(v.z() > 0.0);
}

TEST_CASE("device draws fill the four quadrants evenly")
{
    const auto d = deploy_devices(10000, 3.0, 3.0, 5.0, 7);
    int q[4] = {0, 0, 0, 0};
    for (const auto& u : d.positions)
        ++q[(u.x() >= 0 ? 1 : 0) + (u.y() >= 0 ? 2 : 0)];
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(q[i] / 10000.0 - 0.25) <= 0.02);
}

TEST_CASE("non-positive dimensions are configuration errors")
{
    GeometryParams p;
    p.spacing = 0.0;
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
    p = GeometryParams{};
    p.area_x = -1.0;
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
    p = GeometryParams{};
    p.feeder_distance = 0.0;
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
    p = GeometryParams{};
    p.circumradius = -0.1;
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
    p = GeometryParams{};
    p.its_elements = 0;
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
}

TEST_CASE("boresight angle hand values")
{
    const Vec3 o = Vec3::Zero();
    const Vec3 down(0.0, 0.0, -1.0);
    CHECK(boresight_angle(o, down, Vec3(0.0, 0.0, -3.0)) == Approx(0.0).margin(1e-15));
    CHECK(boresight_angle(o, down, Vec3(2.0, 0.0, 0.0)) == Approx(kPi / 2).epsilon(1e-15));
    CHECK(boresight_angle(o, down, Vec3(1.0, 0.0, -1.0)) == Approx(std::acos(1.0 / std::sqrt(2.0))).epsilon(1e-14));
    CHECK(boresight_angle(o, down, Vec3(1.0, 0.0, -1.0)) == Approx(kPi / 4).epsilon(1e-14));
    CHECK(boresight_angle(o, down, Vec3(0.0, 0.0, 1.0)) == Approx(kPi));
    CHECK_THROWS_AS(boresight_angle(o, down, o), DegenerateGeometryError);
    CHECK_THROWS_AS(boresight_angle(o, Vec3(0, 0, -2), Vec3(1, 0, 0)), ParameterError);
}

TEST_CASE("boresight angle is unchanged by a common rigid motion")
{
    std::mt19937_64 gen(11);
    auto u = [&] { return 2.0 * uniform01(gen) - 1.0; };
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 s(u(), u(), u());
        const Vec3 b = Vec3(u(), u(), u()).normalized();
        const Vec3 t(u(), u(), u());
        const Eigen::Quaterniond q = Eigen::Quaterniond(u(), u(), u(), u()).normalized();
        const Vec3 shift(u(), u(), u());
        const double before = boresight_angle(s, b, t);
        const Vec3 rb = (q * b).normalized();
        const double after = boresight_angle(q * s + shift, rb, q * t + shift);
        CHECK(std::abs(before - after) < 1e-10);
    }
}

TEST_CASE("fixed devices override the random deployment")
{
    GeometryParams p;
    p.its_elements = 9;
    p.feeder_antennas = 1;
    p.circumradius = 0.0;
    p.fixed_devices = std::vector<Vec3>{Vec3(0.0, 0.0, -1.5)};
    const auto g = build_scenario(p, 99);
    REQUIRE(g.devices.size() == 1);
    CHECK(g.devices.positions[0] == Vec3(0.0, 0.0, -1.5));
    p.fixed_devices = std::vector<Vec3>{Vec3(0.0, 0.0, 1.5)};
    CHECK_THROWS_AS(build_scenario(p, 1), ConfigError);
}
