#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tweezer/controls.hpp"
#include "tweezer/errors.hpp"
#include "tweezer/harmonic.hpp"

using namespace tweezer;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_SUITE("controls") {

TEST_CASE("harmonic series keeps the base at the endpoints") {
    const auto base = ProfileBase::linear(-1.0, 2.0);
    const std::vector<double> c{0.3, -0.2, 0.05, 0.7, -1.1};
    const auto f = harmonic_series(base, c, 4.0);
    CHECK(f(0.0) == -1.0);
    CHECK(std::abs(f(4.0) - 2.0) < 1e-14);
    for (double t : {0.3, 1.7, 3.2}) {
        double expected = -1.0 + 3.0 * t / 4.0;
        for (std::size_t k = 0; k < c.size(); ++k) expected += c[k] * std::sin((k + 1.0) * pi * t / 4.0);
        CHECK(f(t) == doctest::Approx(expected).epsilon(1e-14));
    }
    const auto plain = harmonic_series(base, {}, 4.0);
    for (double t : {0.0, 1.0, 2.5, 4.0}) CHECK(plain(t) == doctest::Approx(-1.0 + 0.75 * t).epsilon(1e-15));
    CHECK_THROWS_AS(harmonic_series(base, std::vector<double>(33, 0.0), 1.0), DomainError);
}

TEST_CASE("first harmonic spans the whole displacement") {
    const std::vector<double> c{0.1};
    const auto f = harmonic_series(ProfileBase::linear(0.0, 1.0), c, 1.0);
    // the correction is one half-period of a sine over the duration, peaking mid-way
    double best_t = 0.0, best = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const double d = f(t) - t;
        if (d > best) best = d, best_t = t;
    }
    CHECK(best_t == doctest::Approx(0.5));
    CHECK(best == doctest::Approx(0.1));
}

TEST_CASE("reversed profile runs backwards in time") {
    const std::vector<double> c{0.2, -0.1};
    const auto f = harmonic_series(ProfileBase::linear(0.0, 1.0), c, 3.0);
    const auto r = f.reversed();
    for (double t : {0.0, 0.4, 1.5, 2.9, 3.0}) CHECK(r(t) == doctest::Approx(f(3.0 - t)).epsilon(1e-14));
}

TEST_CASE("transport ramp") {
    const std::vector<double> c{0.01, -0.02, 0.005};
    const auto ramp = transport_ramp(2.0, c);
    CHECK(ramp.position(0.0) == 0.0);
    CHECK(std::abs(ramp.position(2.0) - 1.0) < 1e-14);
    for (double t : {0.0, 0.5, 1.3, 2.0}) CHECK(ramp.depth(t) == 500.0);
    CHECK_FALSE(ramp.depth_clamped());
}

TEST_CASE("constant-xi ramp-up follows the frequency profile") {
    const LatticeSpec lat;
    const double duration = 1.4;
    const auto ramp = rampup_ramp(500.0, duration, lat);
    const auto& base = ramp.depth_profile().base();
    CHECK(ramp.depth(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ramp.depth(duration) == doctest::Approx(500.0).epsilon(1e-10));
    const double m = UnitSystem::mass_internal;
    const double c_lat = 2.0 * pi * pi * 50.0;
    for (double t : {0.2, 0.7, 1.1}) {
        const double w = harmonic::frequency_profile(base.xi, base.omega_initial, t);
        CHECK(c_lat + 4.0 * ramp.depth(t) / 0.25 == doctest::Approx(m * w * w).epsilon(1e-12));
    }
    double previous = -1.0;
    for (int i = 0; i <= 50; ++i) {
        const double d = ramp.depth(duration * i / 50.0);
        CHECK(d >= previous);
        previous = d;
    }
    const auto zero = rampup_ramp(0.0, duration, lat);
    for (double t : {0.0, 0.7, duration}) CHECK(zero.depth(t) == 0.0);
}

TEST_CASE("band map ramps") {
    const auto spec = BandMapSpec::standard(UnitSystem::standard());
    CHECK(spec.start_depth == 400.0);
    CHECK(spec.aux_depth == 200.0);
    CHECK(spec.harmonics == 15);
    CHECK(UnitSystem::standard().to_microseconds(spec.duration) == doctest::Approx(75.0).epsilon(1e-12));
    const auto r = bandmap_ramp(spec, {}, {});
    CHECK_FALSE(r.clamped);
    CHECK(r.transport.depth(0.0) == 400.0);
    CHECK(r.transport.depth(spec.duration) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.transport.depth(0.5 * spec.duration) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(r.transport.position(0.0) == -1.0);
    CHECK(r.transport.position(spec.duration) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.auxiliary.depth(0.3 * spec.duration) == 200.0);
    CHECK(r.auxiliary.position(0.3 * spec.duration) == 0.0);

    const std::vector<double> dig{-300.0};
    CHECK(bandmap_ramp(spec, dig, {}).clamped);
    CHECK_THROWS_AS(bandmap_ramp(spec, std::vector<double>(16, 0.0), {}), DomainError);
}

TEST_CASE("spatial period of the highest harmonic") {
    CHECK(harmonic_spatial_period(1.0, 15) == doctest::Approx(0.133).epsilon(3e-3));
    CHECK(harmonic_spatial_period(1.0, 1) == 2.0);
    CHECK_THROWS_AS(harmonic_spatial_period(1.0, 0), DomainError);
}

TEST_CASE("error injection") {
    const std::vector<double> c{0.01, 0.02};
    const auto ramp = transport_ramp(2.0, c, 300.0);
    const auto same = inject_errors(ramp, {});
    for (double t : {0.0, 0.6, 2.0}) {
        CHECK(same.position(t) == ramp.position(t));
        CHECK(same.depth(t) == ramp.depth(t));
    }
    const auto off = inject_errors(ramp, {0.01, 0.999});
    CHECK(off.duration() == ramp.duration());
    for (double t : {0.0, 0.6, 2.0}) {
        CHECK(off.position(t) == doctest::Approx(ramp.position(t) + 0.01).epsilon(1e-14));
        CHECK(off.depth(t) == doctest::Approx(0.999 * ramp.depth(t)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(inject_errors(ramp, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(inject_errors(ramp, {0.0, -1.0}), DomainError);
}

TEST_CASE("clamping at zero depth") {
    ControlRamp r(1.0, harmonic_series(ProfileBase::linear(1.0, 0.0), std::vector<double>{-2.0}, 1.0),
                  Profile(ProfileBase::constant(0.0), {}, 1.0));
    CHECK(r.depth_clamped());
    CHECK(r.clamp_violation() > 0.5);
    CHECK(r.raw_depth(0.5) < 0.0);
    CHECK(r.depth(0.5) == 0.0);
}

}
