// SPDX-License-Identifier: Apache-2.0
#include "wetbeam/errors.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace wetbeam;
using Catch::Approx;

namespace {

DohertyParams doherty(int ways)
{
    DohertyParams p;
    p.ways = ways;
    p.peak_efficiency = 0.25;
    p.max_output = 300.0;
    p.gain = 100.0;
    return p;
}

} // namespace

TEST_CASE("HPA output power hand values")
{
    std::vector<cvec> b{cvec::Zero(3)};
    CHECK(hpa_output_power(b, 1, 100.0) == 0.0);
    b[0](1) = cdouble(0.1, 0.0);
    CHECK(hpa_output_power(b, 1, 100.0) == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(hpa_output_power(b, 3, 100.0), ShapeError);
    CHECK_THROWS_AS(hpa_output_power(b, -1, 100.0), ShapeError);
    const rvec all = chain_output_powers(b, 100.0);
    CHECK(all(0) == 0.0);
    CHECK(all(1) == Approx(1.0));
}

TEST_CASE("HPA output power is the mean power of the amplified symbol mix")
{
    std::mt19937_64 gen(17);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<cvec> b(3, cvec(2));
    b[0] << cdouble(0.3, 0.1), cdouble(0.0, 0.2);
    b[1] << cdouble(-0.2, 0.4), cdouble(0.1, 0.0);
    b[2] << cdouble(0.05, -0.15), cdouble(0.2, 0.2);
    const double g = 100.0;
    const int draws = 100000;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        cdouble x = 0.0;
        for (const auto& bq : b)
            x += bq(0) * cdouble(normal(gen), normal(gen));
        acc += std::norm(std::sqrt(g) * x);
    }
    CHECK(acc / draws == Approx(hpa_output_power(b, 0, g)).epsilon(0.02));
}

TEST_CASE("Doherty consumption hand values")
{
    const auto p = doherty(2);
    CHECK(doherty_consumption(75.0, p) == Approx(300.0).epsilon(1e-14));
    CHECK(drain_efficiency(75.0, p) == Approx(0.25).epsilon(1e-14));
    CHECK(doherty_consumption(300.0, p) == Approx(1200.0).epsilon(1e-14));
    CHECK(doherty_consumption(150.0, p) == Approx((3.0 * std::sqrt(45000.0) - 300.0) / 0.5).epsilon(1e-14));
    CHECK(doherty_consumption(150.0, p) == Approx(672.79).margin(5e-3));
    CHECK(drain_efficiency(150.0, p) == Approx(0.2230).margin(5e-5));
    CHECK(doherty_consumption(0.0, p) == 0.0);
}

TEST_CASE("Doherty branches meet at the back-off point and peak at eta_max")
{
    for (int l : {1, 2, 3, 4}) {
        const auto p = doherty(l);
        const double backoff = p.max_output / (l * l);
        CHECK(std::abs(drain_efficiency(backoff, p) - 0.25) < 1e-9);
        CHECK(std::abs(drain_efficiency(p.max_output, p) - 0.25) < 1e-9);
        const double carrier = std::sqrt(backoff * p.max_output) / (l * 0.25);
        const double peaking = ((l + 1.0) * std::sqrt(backoff * p.max_output) - p.max_output) / (l * 0.25);
        CHECK(std::abs(carrier - peaking) <= 1e-9 * carrier);
        CHECK(carrier == Approx(p.max_output / (l * l * 0.25)));
    }
}

TEST_CASE("Doherty consumption rises strictly and efficiency never exceeds eta_max")
{
    for (int l : {1, 2, 3, 4}) {
        const auto p = doherty(l);
        double previous = 0.0;
        for (int i = 1; i <= 10000; ++i) {
            const double P = p.max_output * i / 10000.0;
            const double c = doherty_consumption(P, p);
            CHECK(c > previous);
            previous = c;
            CHECK(drain_efficiency(P, p) <= 0.25 + 1e-12);
        }
    }
}

TEST_CASE("single-way amplifier keeps one class-B branch up to P_max")
{
    const auto p = doherty(1);
    for (double P : {1.0, 50.0, 150.0, 299.0})
        CHECK(doherty_consumption(P, p) == Approx(std::sqrt(P * 300.0) / 0.25).epsilon(1e-14));
}

TEST_CASE("Doherty domain errors")
{
    const auto p = doherty(2);
    CHECK_THROWS_AS(doherty_consumption(300.0001, p), SaturationError);
    CHECK_THROWS_AS(doherty_consumption(-1.0, p), ParameterError);
    CHECK_THROWS_AS(drain_efficiency(0.0, p), UndefinedEfficiencyError);
    auto bad = p;
    bad.ways = 0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = p;
    bad.peak_efficiency = 1.5;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = p;
    bad.gain = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("insertion loss hand values")
{
    const auto fc = insertion_loss(HybridKind::FullyConnected, 100, 4, 0.5, 0.5, 3.5);
    CHECK(fc.total_db == Approx(8.0));
    CHECK(fc.factor == Approx(std::pow(10.0, 0.8)).epsilon(1e-14));
    CHECK(fc.factor == Approx(6.310).margin(5e-4));
    const auto pc = insertion_loss(HybridKind::PartiallyConnected, 100, 4, 0.5, 0.5, 3.5);
    CHECK(pc.total_db == Approx(6.0));
    CHECK(pc.factor == Approx(3.981).margin(5e-4));
    const auto one = insertion_loss(HybridKind::PartiallyConnected, 4, 4, 0.5, 0.5, 3.5);
    CHECK(one.total_db == Approx(3.5));
    CHECK_THROWS_AS(insertion_loss(HybridKind::FullyConnected, 3, 4, 0.5, 0.5, 3.5), ConfigError);
}

TEST_CASE("partially connected loss never exceeds fully connected loss")
{
    for (int M = 2; M <= 1024; M += (M < 64 ? 1 : 7))
        for (int N = 2; N <= M; N += (N < 16 ? 1 : 13)) {
            const auto fc = insertion_loss(HybridKind::FullyConnected, M, N, 0.5, 0.5, 3.5);
            const auto pc = insertion_loss(HybridKind::PartiallyConnected, M, N, 0.5, 0.5, 3.5);
            CHECK(pc.factor <= fc.factor);
            CHECK(fc.factor >= 1.0);
        }
}

TEST_CASE("total power bookkeeping")
{
    PowerModel model;
    BeamformingSolution s;
    s.architecture = Architecture::Its;
    s.precoders = {cvec::Zero(4)};
    s.analog = cvec::Ones(100);
    CHECK(total_power(s, model, 100) == Approx(1.4).epsilon(1e-14));

    // one chain at the back-off point: 75 W output draws 300 W
    s.precoders[0](2) = cdouble(std::sqrt(0.75), 0.0);
    CHECK(total_power(s, model, 100) == Approx(301.4).epsilon(1e-13));

    BeamformingSolution fd = s;
    fd.architecture = Architecture::FullyDigital;
    fd.precoders = {cvec::Zero(100)};
    fd.precoders[0](7) = cdouble(0.0, std::sqrt(0.75));
    const double base = total_power(fd, model, 100);
    CHECK(base == Approx(300.3));
    fd.analog = cvec::Constant(100, cdouble(0.0, 1.0));
    CHECK(total_power(fd, model, 100) == base);

    BeamformingSolution hot = s;
    hot.precoders[0](0) = cdouble(2.0, 0.0); // 400 W output
    CHECK_THROWS_AS(total_power(hot, model, 100), SaturationError);
}
