#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tweezer/errors.hpp"
#include "tweezer/search.hpp"

using namespace tweezer;

namespace {

SimplexOptions options(double step, std::size_t budget) {
    SimplexOptions o;
    o.initial_step = {step};
    o.max_evaluations = budget;
    return o;
}

double bowl(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("quadratic bowl") {
    const std::vector<double> x0(4, 1.0);
    const auto r = nelder_mead(bowl, x0, options(0.5, 4000));
    CHECK(r.best_value < 1e-10);
    CHECK(r.converged);
}

TEST_CASE("rosenbrock within 500 evaluations") {
    const std::vector<double> x0{-1.2, 1.0};
    const auto r = nelder_mead(rosenbrock, x0, options(0.5, 500));
    CHECK(r.evaluations <= 500);
    CHECK(r.best_value < 1e-6);
    CHECK(r.best[0] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("incumbent never gets worse") {
    const std::vector<double> x0{-1.2, 1.0};
    const auto r = nelder_mead(rosenbrock, x0, options(0.5, 300));
    REQUIRE(r.history.size() == r.evaluations);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    for (double h : r.history) CHECK(r.best_value <= h);
    CHECK(rosenbrock(r.best) == r.best_value);
}

TEST_CASE("coordinate relabelling leaves the optimum value alone") {
    auto f = [](std::span<const double> x) {
        return std::pow(x[0] - 1.0, 2) + std::pow(x[1] - 1.0, 2) + std::pow(x[2] - 1.0, 2) +
               0.5 * x[0] * x[1] * x[2];
    };
    auto g = [&](std::span<const double> x) {
        const double y[3] = {x[2], x[0], x[1]};
        return f(y);
    };
    const std::vector<double> x0{0.2, 0.3, 0.4};
    const std::vector<double> y0{0.4, 0.2, 0.3};
    const auto a = nelder_mead(f, x0, options(0.3, 4000));
    const auto b = nelder_mead(g, y0, options(0.3, 4000));
    CHECK(a.best_value == doctest::Approx(b.best_value).epsilon(1e-9));
}

TEST_CASE("runs are reproducible") {
    const std::vector<double> x0{-1.2, 1.0};
    const auto a = nelder_mead(rosenbrock, x0, options(0.5, 200));
    const auto b = nelder_mead(rosenbrock, x0, options(0.5, 200));
    CHECK(a.best == b.best);
    CHECK(a.history == b.history);
}

TEST_CASE("non-finite objective values") {
    const std::vector<double> x0{0.0};
    auto nan_at_start = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(nelder_mead(nan_at_start, x0, options(0.1, 100)), InputError);
    // a wall of NaN beyond 1.5 is treated as +infinity, so the search stops at it
    auto walled = [](std::span<const double> x) {
        return x[0] > 1.5 ? std::numeric_limits<double>::quiet_NaN() : std::pow(x[0] - 2.0, 2);
    };
    const auto r = nelder_mead(walled, x0, options(0.4, 500));
    CHECK(r.best[0] <= 1.5);
    CHECK(std::isfinite(r.best_value));
}

TEST_CASE("option validation") {
    const std::vector<double> x0{0.0, 0.0};
    auto o = options(0.1, 2);
    CHECK_THROWS_AS(nelder_mead(bowl, x0, o), InputError);
    o = options(0.1, 100);
    o.reflection = -1.0;
    CHECK_THROWS_AS(nelder_mead(bowl, x0, o), InputError);
    o = options(0.1, 100);
    o.initial_step = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(nelder_mead(bowl, x0, o), InputError);
    o = options(0.0, 100);
    CHECK_THROWS_AS(nelder_mead(bowl, x0, o), InputError);
}

TEST_CASE("default simplex settings") {
    const auto t = transport_simplex_defaults(5);
    CHECK(t.reflection == 1.0);
    CHECK(t.expansion == 2.0);
    CHECK(t.contraction == 0.5);
    CHECK(t.shrink == 0.5);
    CHECK(t.restarts == 3);
    CHECK(t.f_tolerance == 1e-12);
    CHECK(t.x_tolerance == 1e-8);
    const auto b = bandmap_simplex_defaults(15);
    REQUIRE(b.initial_step.size() == 30);
    CHECK(b.initial_step[0] == 10.0);
    CHECK(b.initial_step[14] == 10.0);
    CHECK(b.initial_step[15] == 0.02);
}

TEST_CASE("coefficient files round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "tweezer_coefficients_test.txt").string();
    const std::vector<double> c{0.1, -2.5e-7, 3.0, 1.0 / 3.0};
    write_coefficients(path, {{"scenario", "test"}, {"harmonics", "4"}}, c);
    std::map<std::string, std::string> meta;
    const auto back = read_coefficients(path, &meta);
    CHECK(back == c);
    CHECK(meta.at("scenario") == "test");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_coefficients(path), InputError);
}

TEST_CASE("transport search without harmonics returns the baseline") {
    Resolution res;
    res.points_per_site = 128;
    res.steps_per_period = 60.0;
    const TransportSetup setup(LatticeSpec{}, UnitSystem::standard().microseconds(25.0), 500.0, 0.5, res);
    const auto out = optimize_transport(setup, 0, transport_simplex_defaults(0), false);
    CHECK(out.result.best_value == out.baseline);
    CHECK(out.baseline > 0.0);
}

TEST_CASE("verification agreement") {
    CHECK(verification_agrees(1e-4, 1.2e-4));
    CHECK_FALSE(verification_agrees(1e-4, 3e-4));
    CHECK(verification_agrees(0.0, 0.0));
}

TEST_CASE("repack harmonics pads and truncates both halves") {
    const std::vector<double> packed{1.0, 2.0, 10.0, 20.0};
    CHECK(repack_harmonics(packed, 3) == std::vector<double>{1.0, 2.0, 0.0, 10.0, 20.0, 0.0});
    CHECK(repack_harmonics(packed, 1) == std::vector<double>{1.0, 10.0});
    CHECK(repack_harmonics({}, 2) == std::vector<double>(4, 0.0));
    const std::vector<double> odd{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(repack_harmonics(odd, 2), InputError);
}

TEST_CASE("band map stage schedule validation") {
    BandMapStages stages;
    CHECK_NOTHROW(stages.validate(15));
    CHECK_THROWS_AS(stages.validate(8), InputError);
    stages.harmonics = {2, 2};
    CHECK_THROWS_AS(stages.validate(15), InputError);
    stages.harmonics = {};
    CHECK_NOTHROW(stages.validate(15));
    stages.evaluations_per_coefficient = 0;
    CHECK_THROWS_AS(stages.validate(15), InputError);
}

TEST_CASE("staged band map search respects the overall cap and never worsens") {
    const UnitSystem units = UnitSystem::standard();
    BandMapSpec spec = BandMapSpec::standard(units);
    spec.harmonics = 2;
    Resolution res;
    res.points_per_site = 64;
    res.steps_per_period = 40.0;
    const BandMapSetup setup(LatticeSpec{}, spec, res);
    BandMapStages stages;
    stages.harmonics = {1};
    stages.evaluations_per_coefficient = 4;
    stages.max_evaluations = 12;
    const auto out = optimize_bandmap_staged(setup, stages, false);
    CHECK(out.result.best.size() == 4);
    CHECK(out.result.evaluations <= 12);
    CHECK(out.result.best_value <= out.baseline.infidelity);
    CHECK(out.optimum.infidelity == doctest::Approx(out.result.best_value).epsilon(1e-12));
}

}
