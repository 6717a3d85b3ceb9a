#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tweezer/units.hpp"

namespace tweezer {

// Cosine lattice V(x) = depth * sin^2(pi (x - origin) / spacing); minima sit at
// origin + integer multiples of the spacing. Internal units throughout.
struct LatticeSpec {
    double depth = 50.0;
    double spacing = 1.0;
    double origin = 0.0;

    void validate() const;
    double operator()(double x) const noexcept;
};

enum class Polarization { Linear, SigmaPlus, SigmaMinus };

// Attractive Gaussian beam, V(x) = -depth * exp(-2 (x - center)^2 / waist^2).
struct TweezerSpec {
    double depth = 500.0;
    double waist = 0.5;
    double center = 0.0;
    double wavelength = 0.0;  // m, only consulted by the light-shift model
    Polarization polarization = Polarization::Linear;

    void validate() const;
    double operator()(double x) const noexcept;
};

// Time dependence of a tweezer term. Either callable may be empty, in which
// case the static value from the TweezerSpec is used.
struct TweezerDrive {
    std::function<double(double)> depth;
    std::function<double(double)> center;
};

// Sum of lattice and tweezer terms. Immutable once assembled and safe to share
// between threads; all evaluation is const.
class PotentialField {
public:
    PotentialField() = default;

    PotentialField& add_lattice(const LatticeSpec& spec);
    PotentialField& add_tweezer(const TweezerSpec& spec, TweezerDrive drive = {});

    bool is_static() const noexcept;
    double operator()(double x, double t = 0.0) const;

    // out[i] = V(xs[i], t). Drives are evaluated once per call.
    void sample(std::span<const double> xs, double t, std::span<double> out) const;

    // Static field with every drive frozen at time t.
    PotentialField at_time(double t) const;

    const std::vector<LatticeSpec>& lattices() const noexcept { return lattices_; }
    std::size_t tweezer_count() const noexcept { return tweezers_.size(); }
    TweezerSpec tweezer_at(std::size_t index, double t) const;

private:
    struct TweezerTerm {
        TweezerSpec spec;
        TweezerDrive drive;
    };
    std::vector<LatticeSpec> lattices_;
    std::vector<TweezerTerm> tweezers_;
};

struct TrapFrequency {
    double omega = 0.0;      // internal angular frequency (E_r / hbar)
    double sigma = 0.0;      // oscillator length sqrt(hbar / (m omega)), a_lat
    double curvature = 0.0;  // V''(x_min), E_r / a_lat^2
};

// Harmonic frequency at a local minimum from a 5-point central difference with
// the given spacing. Throws GeometryError for non-positive curvature.
TrapFrequency trap_frequency(const PotentialField& field, double site_center, double stencil = 1e-3,
                             double t = 0.0);

// Harmonic frequency from a curvature, same conventions as trap_frequency.
TrapFrequency harmonic_from_curvature(double curvature);

// Per-line piece of the two-line light shift of one hyperfine state.
struct LineShift {
    double detuning = 0.0;         // rad/s, laser minus transition frequency
    double linewidth = 0.0;        // s^-1
    double line_frequency = 0.0;   // rad/s
    double shift_per_intensity = 0.0;  // J per W/m^2, signed
};

// Scalar + vector light shift from two fine-structure lines,
// U_l = (3 pi c^2 / 2 w_l^3) s_l Gamma_l / Delta_l * I with line-strength
// weights s_3/2 = (2 + P g_F m_F)/3 and s_1/2 = (1 - P g_F m_F)/3. Detunings
// include the ground hyperfine offset of the state. The counter-rotating term
// is added when requested (needed far from resonance, e.g. lattice light).
std::vector<LineShift> light_shift_lines(double laser_wavelength, Polarization polarization,
                                         const HyperfineState& state, const OpticalLine& line_half,
                                         const OpticalLine& line_three_half,
                                         double hyperfine_splitting, bool counter_rotating = false);

// Light shift (J) of `state` in the tweezer's light at the given intensity
// (W/m^2), using the species' 6P lines. Throws ResonanceError within a
// linewidth of either line.
double light_shift(const TweezerSpec& spec, const HyperfineState& state, double intensity,
                   const SpeciesData& species = rubidium87());

// Wavelength (m) between the two 6P lines at which the light shift of `state`
// vanishes. Circular polarization only; throws NoNullError otherwise or when
// no sign change exists.
double null_wavelength(const HyperfineState& state, Polarization polarization,
                       const SpeciesData& species = rubidium87());

}  // namespace tweezer
