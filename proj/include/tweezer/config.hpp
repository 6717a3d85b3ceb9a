#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tweezer/protocols.hpp"
#include "tweezer/units.hpp"

namespace tweezer {

enum class ScenarioId {
    RampupScan,
    TransportScan,
    OptimizeTransport,
    OptimizeBandmap,
    Multisite,
    SensitivityMap,
    Budgets,
    ErrorReport,
    Constants,
};

ScenarioId parse_scenario(std::string_view id);
std::string_view to_string(ScenarioId id);
const std::vector<ScenarioId>& all_scenarios();

// Everything a scenario run needs, in internal units (a_lat, E_r, hbar/E_r)
// except where a name says otherwise. Defaults reproduce the standard setup.
struct ScenarioConfig {
    ScenarioId scenario = ScenarioId::Constants;
    std::string output = "out";
    std::size_t threads = 1;
    std::size_t frames = 25;  // trajectory dump frames, 0: no dump

    LatticeSpec lattice;
    double tweezer_depth = 500.0;
    double waist = 0.5;
    Resolution resolution;
    double transport_steps_per_period = Resolution::transport().steps_per_period;  // transport, scan, multisite

    double rampup_depth = 500.0;
    double rampup_t_min = 0.0;
    double rampup_t_max = 0.0;
    std::size_t rampup_points = 57;

    double transport_duration = 0.0;
    double transport_t_min = 0.0;
    double transport_t_max = 0.0;
    std::size_t transport_points = 81;
    std::size_t transport_harmonics = 5;
    std::size_t transport_max_evaluations = 0;  // 0: optimizer default
    std::string transport_coefficients;         // optional file with optimized coefficients

    std::size_t multisite_sites = 100;

    double bandmap_start_depth = 400.0;
    double bandmap_aux_depth = 200.0;
    double bandmap_duration = 0.0;
    std::size_t bandmap_harmonics = 15;
    std::size_t bandmap_max_evaluations = 12000;         // overall cap, 0: none
    std::vector<std::size_t> bandmap_stages{1, 2, 4, 8};  // coarse-to-fine harmonic counts, may be empty
    std::size_t bandmap_evaluations_per_coefficient = 300;
    std::string bandmap_coefficients;

    double sensitivity_offset_max = 0.0;  // a_lat, map spans [-max, max]
    std::size_t sensitivity_offset_points = 21;
    double sensitivity_scale_span = 1e-2;  // map spans 1 +- span
    std::size_t sensitivity_scale_points = 21;
    std::vector<double> sensitivity_levels{1e-3, 2e-3, 3e-3, 4e-3, 5e-3};

    std::vector<std::size_t> budget_sites{0, 1, 5};

    double tweezer_wavelength = 431.555e-9;  // m, far-detuned tweezer
    double field_noise = 50e-6;              // G
    double relative_intensity = 1e-5;
    double hold = 0.0;
    double tweezer_exposure = 0.0;
    double spin_exposure = 0.0;
    double lattice_exposure = 0.0;

    // Defaults that depend on the unit system (durations, windows).
    static ScenarioConfig defaults(const UnitSystem& units = UnitSystem::standard());
};

// Parses `section.key = value` lines. '#' starts a comment; blank lines are
// ignored. Dimensional values need a unit suffix:
//   time    ns us ms s tu (tu = hbar/E_r)
//   length  nm um m alat
//   energy  Er Hz kHz MHz (E/h)
//   field   uG mG G
// Unknown keys, duplicates, bad numbers and missing units throw ConfigError
// with the line and column of the offending token.
ScenarioConfig parse_config(std::string_view text, const UnitSystem& units = UnitSystem::standard());
ScenarioConfig load_config(const std::string& path, const UnitSystem& units = UnitSystem::standard());

// Every key with its resolved value, in a form parse_config reads back to the
// same configuration.
std::string resolved_config(const ScenarioConfig& config);

// Sorted list of accepted keys.
std::vector<std::string> config_keys();

}  // namespace tweezer
