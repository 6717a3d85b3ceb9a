#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tweezer/errors.hpp"
#include "tweezer/harmonic.hpp"

using namespace tweezer;
using namespace tweezer::harmonic;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);
}

TEST_SUITE("analytic_harmonic") {

TEST_CASE("envelope") {
    CHECK(envelope_excitation(0.0) == 0.0);
    CHECK(envelope_excitation(0.016) == doctest::Approx(1.02e-3).epsilon(1e-2));
    CHECK(std::abs(envelope_excitation(0.016) - 1.02e-3) < 1e-5);
    CHECK(envelope_excitation(1e8) == doctest::Approx(1.0).epsilon(1e-12));
    for (double xi : {1e-3, 0.05, 0.3, 2.0}) {
        const double e = 4.0 * xi * xi / (1.0 + 4.0 * xi * xi);
        CHECK(envelope_excitation(xi) == e);
    }
}

TEST_CASE("ramp-up time") {
    const double wo = 2.0 * pi * 30e3, wf = 2.0 * pi * 95e3;
    CHECK(rampup_time(0.1, wo, wo) == 0.0);
    const double t1 = rampup_time(0.02, wo, wf);
    CHECK(rampup_time(0.04, wo, wf) == doctest::Approx(t1 / 2.0).epsilon(1e-14));
    CHECK(t1 == doctest::Approx((1.0 - wo / wf) / (4.0 * sqrt2 * 0.02 * wo)).epsilon(1e-14));
    CHECK_THROWS_AS(rampup_time(0.02, wf, wo), DomainError);
    CHECK_THROWS_AS(rampup_time(0.0, wo, wf), DomainError);
    // inversion: the xi that finishes in 11 us
    const double xi = adiabaticity_for_rampup(11e-6, wo, wf);
    CHECK(rampup_time(xi, wo, wf) == doctest::Approx(11e-6).epsilon(1e-12));
}

TEST_CASE("constant-xi frequency profile") {
    const double xi = 0.03, wo = 2.0;
    CHECK(frequency_profile(xi, wo, 0.0) == wo);
    const double wf = 7.0;
    CHECK(frequency_profile(xi, wo, rampup_time(xi, wo, wf)) == doctest::Approx(wf).epsilon(1e-12));
    const double h = 1e-6;
    const double slope = (frequency_profile(xi, wo, h) - frequency_profile(xi, wo, -h)) / (2.0 * h);
    CHECK(slope == doctest::Approx(4.0 * sqrt2 * xi * wo * wo).epsilon(1e-8));
    const double pole = 1.0 / (4.0 * sqrt2 * xi * wo);
    double previous = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double w = frequency_profile(xi, wo, 0.99 * pole * i / 100.0);
        CHECK(w > previous);
        previous = w;
    }
    CHECK_THROWS_AS(frequency_profile(xi, wo, pole * (1.0 + 1e-12)), DomainError);
    CHECK_THROWS_AS(frequency_profile(xi, wo, 1.1 * pole), DomainError);
}

TEST_CASE("ramp-up excitation structure") {
    const double xi = 0.05, wo = 3.0;
    const double env = envelope_excitation(xi);
    CHECK(rampup_excitation(0.0, xi, wo) == 0.0);
    const double pole = 1.0 / (4.0 * sqrt2 * xi * wo);
    double peak = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double p = rampup_excitation(0.9999 * pole * i / 20000.0, xi, wo);
        CHECK(p >= 0.0);
        CHECK(p <= env * (1.0 + 1e-14));
        peak = std::max(peak, p);
    }
    CHECK(peak == doctest::Approx(env).epsilon(1e-4));
    // zeros where sqrt(2 xi^2 + 1/2) log(1 - 4 sqrt2 t xi wo) / (4 xi) = -k pi
    const double rate = std::sqrt(2.0 * xi * xi + 0.5) / (4.0 * xi);
    for (int k = 1; k <= 3; ++k) {
        const double tk = (1.0 - std::exp(-k * pi / rate)) / (4.0 * sqrt2 * xi * wo);
        CHECK(rampup_excitation(tk, xi, wo) < 1e-20);
    }
    CHECK_THROWS_AS(rampup_excitation(pole, xi, wo), DomainError);
}

TEST_CASE("transport velocity") {
    const auto v = transport_velocity(0.016, 36e-9, 2.0 * pi * 90e3, 532e-9);
    // m/s -> um/ms is a factor 1e3
    CHECK(v.velocity * 1e3 == doctest::Approx(0.45).epsilon(0.05));
    CHECK(v.single_site_time * 1e3 == doctest::Approx(1.2).epsilon(0.05));
    const auto v2 = transport_velocity(0.032, 36e-9, 2.0 * pi * 90e3, 532e-9);
    CHECK(v2.velocity == doctest::Approx(2.0 * v.velocity).epsilon(1e-14));
    CHECK(v.velocity == doctest::Approx(sqrt2 * 0.016 * 36e-9 * 2.0 * pi * 90e3).epsilon(1e-14));
}

TEST_CASE("transport excitation") {
    const double xi = 0.016, w = 5.0;
    const double env = envelope_excitation(xi);
    CHECK(transport_excitation(0.0, xi, w) == 0.0);
    double peak = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double p = transport_excitation(i * 1e-3, xi, w);
        CHECK(p >= 0.0);
        CHECK(p <= env * (1.0 + 1e-14));
        peak = std::max(peak, p);
    }
    CHECK(peak == doctest::Approx(env).epsilon(1e-4));
    // zeros spaced by 2 pi / (omega sqrt(1 + 4 xi^2)), close to 2 pi / omega
    const double period = 2.0 * pi / (w * std::sqrt(1.0 + 4.0 * xi * xi));
    CHECK(transport_excitation(period, xi, w) < 1e-25);
    CHECK(transport_excitation(3.0 * period, xi, w) < 1e-25);
    CHECK(period == doctest::Approx(2.0 * pi / w).epsilon(1e-3));
}

TEST_CASE("depth for a target frequency inverts the curvature sum") {
    const double m = 4.9, c_lat = 300.0, waist = 0.5, omega = 40.0;
    const double depth = tweezer_depth_for_frequency(omega, m, c_lat, waist);
    CHECK(c_lat + 4.0 * depth / (waist * waist) == doctest::Approx(m * omega * omega).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    AdiabaticityParams p;
    p.xi = 0.01;
    p.omega_initial = 1.0;
    p.omega_final = 2.0;
    CHECK_NOTHROW(p.validate());
    p.omega_final = 0.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.omega_final = 2.0;
    p.xi = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

}
