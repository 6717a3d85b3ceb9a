#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tweezer/errors.hpp"
#include "tweezer/harmonic.hpp"
#include "tweezer/protocols.hpp"

using namespace tweezer;

namespace {
constexpr double pi = std::numbers::pi;
const UnitSystem units = UnitSystem::standard();

Resolution coarse() {
    Resolution r;
    r.points_per_site = 128;
    r.steps_per_period = 60.0;
    return r;
}
}  // namespace

TEST_SUITE("protocols") {

TEST_CASE("resolution doubling") {
    const Resolution r;
    const auto d = r.doubled();
    CHECK(d.sites == r.sites);
    CHECK(d.points_per_site == 2 * r.points_per_site);
    CHECK(d.steps_per_period == 2.0 * r.steps_per_period);
    Resolution bad;
    bad.points_per_site = 3;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("tweezer-only translation follows the harmonic envelope") {
    LatticeSpec none;
    none.depth = 0.0;
    const double omega = trap_frequency(PotentialField{}.add_tweezer({}), 0.0).omega;
    const double sigma = std::sqrt(1.0 / (UnitSystem::mass_internal * omega));
    const double xi = 0.05;
    const double t0 = 1.0 / (std::sqrt(2.0) * xi * sigma * omega);
    const double period = 2.0 * pi / omega;
    double peak = 0.0;
    for (int i = 0; i < 16; ++i) {
        const TransportSetup setup(none, t0 + period * i / 16.0, 500.0, 0.5);
        peak = std::max(peak, setup.excitation({}));
    }
    CHECK(peak == doctest::Approx(harmonic::envelope_excitation(xi)).epsilon(0.15));
}

TEST_CASE("reversed transport keeps the error bound") {
    const double duration = units.microseconds(25.0);
    const TransportSetup setup(LatticeSpec{}, duration, 500.0, 0.5, coarse());
    const std::vector<double> c{0.01, -0.004};
    const double forward = setup.excitation(c);

    const ControlRamp back = transport_ramp(duration, c).reversed();
    PotentialField field;
    field.add_lattice({}).add_tweezer({}, back.drive());
    const auto& grid = setup.initial().grid_ptr();
    PotentialField start, end;
    TweezerSpec at_one;
    at_one.center = 1.0;
    start.add_lattice({}).add_tweezer(at_one);
    end.add_lattice({}).add_tweezer({});
    PropagationOptions opt;
    opt.dt = setup.time_step();
    const auto run = propagate(stationary_states(start, grid, 1).ground(), field, 0.0, duration, opt);
    const double reverse = excitation_probability(run.final_state, stationary_states(end, grid, 2));
    CHECK(reverse <= 2.0 * forward);
    CHECK(forward <= 2.0 * reverse);
}

TEST_CASE("ramp-up excitation at the first minimum and in the adiabatic limit") {
    const RampupSetup setup(LatticeSpec{}, 500.0);
    CHECK(setup.excitation(units.microseconds(11.5)) < 1e-3);
    CHECK(setup.excitation(units.microseconds(60.0)) < 1e-3);
    CHECK(setup.excitation(units.microseconds(3.0)) > 1e-3);
    CHECK(setup.omega_final() > setup.omega_initial());
}

TEST_CASE("multisite repeats the single-site step") {
    const TransportSetup setup(LatticeSpec{}, units.microseconds(25.0), 500.0, 0.5, coarse());
    const std::vector<double> c{0.003};
    const auto series = setup.multisite(c, 4);
    REQUIRE(series.size() == 4);
    CHECK(series[0] == doctest::Approx(setup.excitation(c)).epsilon(1e-9));
    for (double p : series) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("band map baseline") {
    auto spec = BandMapSpec::standard(units);
    const BandMapSetup setup(LatticeSpec{}, spec, coarse());
    const auto out = setup.run({}, {});
    CHECK(out.infidelity == doctest::Approx(1.0 - out.transported_fidelity * out.stationary_fidelity).epsilon(1e-12));
    CHECK(out.stationary_fidelity >= out.transported_fidelity);
    CHECK(out.clamp_violation == 0.0);
    CHECK(setup.run_packed(std::vector<double>(30, 0.0)).infidelity == out.infidelity);
}

TEST_CASE("static tweezer errors are present from preparation") {
    const BandMapSetup setup(LatticeSpec{}, BandMapSpec::standard(units), coarse());
    auto mean_x = [](const WaveFunction& psi) {
        const auto rho = psi.density();
        double sum = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) sum += psi.grid().x(i) * rho[i], norm += rho[i];
        return sum / norm;
    };
    ErrorInjection err;
    err.pointing_offset = 0.02;
    const auto out = setup.run({}, {}, err, 2);
    const double shift = mean_x(out.transported.states.front()) - mean_x(setup.transported_initial());
    CHECK(shift == doctest::Approx(0.02).epsilon(0.3));
    CHECK(std::abs(mean_x(out.stationary.states.front()) - mean_x(setup.stationary_initial())) < 0.05 * shift);
}

TEST_CASE("dominant period of a trended oscillation") {
    std::vector<double> s;
    for (int i = 0; i < 100; ++i) s.push_back(0.02 * i + std::sin(2.0 * pi * i / 8.0) + 0.3 * std::sin(2.0 * pi * i / 31.0));
    CHECK(dominant_period(s) == doctest::Approx(8.0).epsilon(0.02));
    std::vector<double> short_series(5, 1.0);
    CHECK_THROWS(dominant_period(short_series));
}

TEST_CASE("numerics hygiene on a trap eigenstate") {
    PotentialField f;
    f.add_lattice({}).add_tweezer({});
    const auto g = Grid::around(0.0, 0.0, 8, 256);
    const auto psi = stationary_states(f, g, 1).ground();
    const auto report = numerics_hygiene(f, psi, trap_frequency(f, 0.0).omega, 100.0, 20.0);
    CHECK(report.passed());
    CHECK(report.steps == 2000);
}

TEST_CASE("convergence agreement rule") {
    CHECK(ConvergenceCheck{0.01, 0.0105}.agrees());
    CHECK_FALSE(ConvergenceCheck{0.01, 0.012}.agrees());
    CHECK(ConvergenceCheck{1e-6, 9e-6}.agrees());
    CHECK(ConvergenceCheck{1e-6, 9e-6}.tolerance() == 1e-5);
}

}
