#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tweezer/potentials.hpp"
#include "tweezer/protocols.hpp"
#include "tweezer/units.hpp"

namespace tweezer {

enum class ScatteringContext { Lattice, FarDetunedTweezer, SpinDependentTweezer };

std::string_view to_string(ScatteringContext context);

// Light at one wavelength acting on one state; each line's share of the
// trap depth scatters at Gamma_line |V_line| / (hbar |Delta_line|).
struct ScatteringScenario {
    ScatteringContext context = ScatteringContext::FarDetunedTweezer;
    double depth = 0.0;               // J, magnitude of the total light shift at the atom
    std::vector<LineShift> lines;     // per-line shares from the light-shift model
    double laser_frequency = 0.0;     // rad/s
    bool counter_rotating = false;    // include the far-detuned correction
    std::size_t beams = 1;            // identical contributions (lattice axes)
    double exposure = 0.0;            // s

    void validate() const;
};

// Tweezer light at `wavelength` (m) with the species' 6P lines.
ScatteringScenario tweezer_scattering(ScatteringContext context, double wavelength, Polarization polarization,
                                      const HyperfineState& state, double depth_joules, double exposure,
                                      const SpeciesData& species = rubidium87());

// Lattice light at `wavelength` with the species' 5P lines, `axes` beams each
// of the given depth.
ScatteringScenario lattice_scattering(double wavelength, const HyperfineState& state, double depth_joules,
                                      std::size_t axes, double exposure,
                                      const SpeciesData& species = rubidium87());

// Photons per second.
double scattering_rate(const ScatteringScenario& scenario);

// 1 - exp(-rate t).
double scattering_probability(double rate, double exposure);

struct DephasingScenario {
    double field_noise = 0.0;        // G
    double relative_intensity = 0.0; // dI / I
    double hold = 0.0;               // s
    double depth = 0.0;              // J, for the intensity case

    void validate() const;
};

struct DephasingResult {
    double energy_spread = 0.0;       // J
    double coherence_time = 0.0;      // s, h / dE; infinite when dE = 0
    double phase_error = 0.0;         // hold / T_c
    bool infinite_coherence = false;
    bool magic = false;               // first-order field-insensitive pair
    std::string note;
};

// Magnetic dephasing of a qubit pair: dE = |d(E_up - E_down)/dB| dB.
DephasingResult dephasing_budget(const DephasingScenario& scenario, QubitPair pair,
                                 const SpeciesData& species = rubidium87());

// rel_noise * depth * hold / hbar (consistent units; internal units have hbar = 1).
double intensity_dephasing(double depth, double relative_noise, double hold, double hbar = 1.0);

struct SensitivityMap {
    std::vector<double> offsets;      // pointing errors, a_lat
    std::vector<double> scales;       // intensity scale factors
    std::vector<double> infidelity;   // row-major: scale index major, offset index minor
    std::vector<std::string> errors;  // per cell, empty when the cell succeeded

    double at(std::size_t offset_index, std::size_t scale_index) const;
    std::pair<std::size_t, std::size_t> minimum() const;  // (offset, scale) indices
};

// Re-runs the band map with every (offset, scale) injected into the transport
// tweezer. Cells are independent and evaluated on `threads` workers; a failing
// cell records its error and a NaN instead of aborting the map.
SensitivityMap sensitivity_map(const BandMapSetup& setup, std::span<const double> packed_coefficients,
                               std::span<const double> offsets, std::span<const double> scales,
                               std::size_t threads = 1);

struct ContourLine {
    double level = 0.0;
    std::vector<std::pair<double, double>> points;  // (offset, scale)
    bool closed = false;
};

// Marching-squares iso-lines of the map at the given levels, joined into
// polylines. Saddle cells are resolved with the cell-centre average.
std::vector<ContourLine> extract_contours(const SensitivityMap& map, std::span<const double> levels);

}  // namespace tweezer
