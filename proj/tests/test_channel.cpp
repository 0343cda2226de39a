// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/channel.hpp"
#include "wetbeam/errors.hpp"
#include "wetbeam/geometry.hpp"
#include "wetbeam/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace wetbeam;
using Catch::Approx;

namespace {

cvec random_cvec(int n, std::mt19937_64& gen)
{
    cvec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = cdouble(2.0 * uniform01(gen) - 1.0, 2.0 * uniform01(gen) - 1.0);
    return v;
}

/// One feeder antenna at height d over a single ITS element at the origin.
ScenarioGeometry on_axis_pair(double d)
{
    ScenarioGeometry g;
    g.its = make_its_layout(1, 0.03);
    g.feeder = make_feeder_layout(1, 0.0, d);
    g.devices.positions = {Vec3(0.0, 0.0, -5.0)};
    return g;
}

} // namespace

TEST_CASE("radiation profile hand values")
{
    CHECK(radiation_profile(0.0, 2.0) == Approx(6.0).epsilon(1e-15));
    CHECK(radiation_profile(kPi / 2, 2.0) == Approx(0.0).margin(1e-30));
    CHECK(radiation_profile(2.0, 2.0) == 0.0);
    CHECK(radiation_profile(-0.1, 2.0) == 0.0);
    CHECK(radiation_profile(kPi / 3, 2.0) == Approx(1.5).epsilon(1e-14));
    CHECK(radiation_profile(0.0, 10.0) == Approx(22.0));
    CHECK_THROWS_AS(radiation_profile(0.0, 1.5), ParameterError);
}

TEST_CASE("radiation profile integrates to 4 pi over the hemisphere")
{
    for (double xi : {2.0, 10.0}) {
        // composite Simpson in beta; the azimuth integral is 2 pi
        const int n = 2000;
        const double h = (kPi / 2) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double b = i * h;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * radiation_profile(b, xi) * std::sin(b);
        }
        const double integral = 2.0 * kPi * s * h / 3.0;
        CHECK(std::abs(integral / (4.0 * kPi) - 1.0) < 1e-3);
    }
}

TEST_CASE("on-axis feeder coefficient magnitude")
{
    RadiationParams p;
    p.wavelength = 0.06;
    p.feeder_gain = 10.0;
    p.its_gain = 2.0;
    const double d = 0.16926;
    const cmat A = feeder_to_its_matrix(on_axis_pair(d), p);
    REQUIRE(A.rows() == 1);
    REQUIRE(A.cols() == 1);
    const double expected = std::sqrt(22.0 * 6.0) * 0.06 / (4.0 * kPi * d);
    CHECK(std::abs(A(0, 0)) == Approx(expected).epsilon(1e-12));
    // sqrt(132) * 0.06 / (4 pi 0.16926) = 0.32410
    CHECK(std::abs(A(0, 0)) == Approx(0.3241).margin(5e-5));
}

TEST_CASE("one wavelength of travel returns to zero phase")
{
    const cdouble c = free_space_coefficient(0.06, 1.0, 0.06);
    CHECK(std::abs(std::arg(c)) < 1e-12);
    const cdouble half = free_space_coefficient(0.03, 1.0, 0.06);
    CHECK(std::abs(std::abs(std::arg(half)) - kPi) < 1e-12);
    CHECK_THROWS_AS(free_space_coefficient(0.0, 1.0, 0.06), DegenerateGeometryError);
}

TEST_CASE("on-axis device coefficient and its distance law")
{
    RadiationParams p;
    p.wavelength = 0.06;
    const auto its = make_its_layout(1, 0.03);
    const cvec h5 = its_to_point_channel(its, Vec3(0, 0, -5.0), p);
    const cvec h10 = its_to_point_channel(its, Vec3(0, 0, -10.0), p);
    CHECK(std::abs(h5(0)) == Approx(std::sqrt(6.0) * 0.06 / (4.0 * kPi * 5.0)).epsilon(1e-12));
    CHECK(std::abs(h5(0)) == Approx(2.339e-3).margin(5e-7));
    CHECK(std::abs(h10(0)) == Approx(std::abs(h5(0)) / 2.0).epsilon(1e-12));
    // behind the transmitting side the profile vanishes
    const cvec back = its_to_point_channel(its, Vec3(0.3, 0.0, 2.0), p);
    CHECK(back(0) == cdouble(0.0, 0.0));
}

TEST_CASE("magnitudes shrink along boresight rays and respect the peak-gain bound")
{
    RadiationParams p;
    p.wavelength = 0.06;
    double previous_a = 1e9, previous_h = 1e9;
    const auto its = make_its_layout(1, 0.03);
    for (double d = 0.05; d < 20.0; d *= 1.3) {
        const double a = std::abs(feeder_to_its_matrix(on_axis_pair(d), p)(0, 0));
        const double h = std::abs(its_to_point_channel(its, Vec3(0, 0, -d), p)(0));
        CHECK(a < previous_a);
        CHECK(h < previous_h);
        previous_a = a;
        previous_h = h;
    }

    GeometryParams gp;
    gp.its_elements = 64;
    gp.feeder_antennas = 4;
    gp.spacing = 0.03;
    gp.circumradius = default_circumradius(4, 0.06);
    gp.feeder_distance = 0.14;
    const auto g = build_scenario(gp, 3);
    const auto ch = build_channels(g, p);
    const double fmax = std::sqrt(radiation_profile(0.0, p.feeder_gain) * radiation_profile(0.0, p.its_gain));
    for (int n = 0; n < ch.antennas(); ++n)
        for (int m = 0; m < ch.elements(); ++m) {
            const double d = (g.feeder.positions[n] - g.its.positions[m]).norm();
            CHECK(std::isfinite(std::abs(ch.A(m, n))));
            CHECK(std::abs(ch.A(m, n)) <= p.wavelength * fmax / (4.0 * kPi * d) * (1.0 + 1e-12));
        }
}

TEST_CASE("effective channel scalar and zero cases")
{
    cvec h(1), phi(1);
    cmat A(1, 1);
    h << cdouble(0.3, -0.4);
    phi << std::polar(1.0, 0.7);
    A << cdouble(-1.2, 0.5);
    const cvec e = effective_channel(h, phi, A);
    // h_eff^H = conj(h) phi a, so h_eff = h conj(phi) conj(a)
    CHECK(std::abs(std::conj(e(0)) - std::conj(h(0)) * phi(0) * A(0, 0)) < 1e-15);
    CHECK(effective_channel(h, cvec::Zero(1), A).norm() == 0.0);
    CHECK_THROWS_AS(effective_channel(cvec::Zero(2), phi, A), ShapeError);
}

TEST_CASE("effective channel against a loop oracle and linearity in phi")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int M = 3, N = 2;
        const cvec h = random_cvec(M, gen);
        const cvec phi = random_cvec(M, gen);
        cmat A(M, N);
        for (int n = 0; n < N; ++n)
            A.col(n) = random_cvec(M, gen);
        const cvec e = effective_channel(h, phi, A);
        for (int n = 0; n < N; ++n) {
            cdouble row = 0.0;
            for (int m = 0; m < M; ++m)
                row += std::conj(h(m)) * phi(m) * A(m, n);
            CHECK(std::abs(std::conj(e(n)) - row) < 1e-12);
        }
        const cvec phi2 = random_cvec(M, gen);
        const cdouble alpha(0.3, -1.1);
        const cvec lhs = effective_channel(h, alpha * phi + phi2, A);
        const cvec rhs = std::conj(alpha) * e + effective_channel(h, phi2, A);
        // h_eff is linear in conj(phi): h_eff(a phi) = conj(a) h_eff(phi)
        CHECK((lhs - rhs).norm() < 1e-12);
    }
}

TEST_CASE("captured power fraction sums column magnitudes")
{
    cmat A(2, 2);
    A << cdouble(0.1, 0.2), cdouble(0.0, 0.3), cdouble(-0.4, 0.0), cdouble(0.5, 0.5);
    const rvec f = captured_power_fraction(A);
    CHECK(f(0) == Approx(0.01 + 0.04 + 0.16));
    CHECK(f(1) == Approx(0.09 + 0.5));
}

TEST_CASE("radiation parameters below the minimum gain are rejected")
{
    RadiationParams p;
    p.its_gain = 1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = RadiationParams{};
    p.wavelength = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    CHECK(wavelength_from_frequency(5e9) == Approx(0.05996));
}
