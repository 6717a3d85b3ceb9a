#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tweezer/controls.hpp"
#include "tweezer/dynamics.hpp"

namespace tweezer {

// Spatial and temporal resolution shared by the single-atom scenarios.
struct Resolution {
    std::size_t sites = 8;
    std::size_t points_per_site = 256;
    double steps_per_period = 100.0;  // of the deepest tweezer trap

    void validate() const;
    Resolution doubled() const;  // twice the points and twice the steps
    // Finer time step for transports; repeated steps amplify phase errors.
    static Resolution transport();
};

// Tweezer switched on over a lattice site at constant adiabaticity.
class RampupSetup {
public:
    RampupSetup(const LatticeSpec& lattice, double target_depth, double waist = 0.5,
                const Resolution& resolution = {});

    double excitation(double duration) const;
    Trajectory run(double duration, std::size_t frames) const;

    const Resolution& resolution() const noexcept { return resolution_; }
    double time_step() const noexcept { return dt_; }
    double omega_initial() const noexcept { return omega_initial_; }
    double omega_final() const noexcept { return omega_final_; }
    double target_depth() const noexcept { return target_depth_; }
    const EigenSet& reference() const noexcept { return reference_; }
    const PotentialField& final_field() const noexcept { return final_field_; }
    PotentialField field(double duration) const;

private:
    LatticeSpec lattice_;
    double target_depth_;
    double waist_;
    Resolution resolution_;
    GridPtr grid_;
    WaveFunction initial_;
    PotentialField final_field_;
    EigenSet reference_;
    double omega_initial_ = 0.0;
    double omega_final_ = 0.0;
    double dt_ = 0.0;
};

struct TransportRun {
    double excitation = 0.0;
    Trajectory trajectory;
};

// Constant-depth tweezer moved from one site to the next.
class TransportSetup {
public:
    TransportSetup(const LatticeSpec& lattice, double duration, double depth = 500.0, double waist = 0.5,
                   const Resolution& resolution = Resolution::transport());

    double excitation(std::span<const double> coefficients) const;
    TransportRun run(std::span<const double> coefficients, std::size_t frames = 0) const;

    // Repeats the single-site ramp `sites` times, re-centring the state after
    // each step by an exact grid translation of one spacing. Amplitude left
    // behind that would wrap around the window is dropped (it counts as error).
    // Returns the excitation after 1..sites steps.
    std::vector<double> multisite(std::span<const double> coefficients, std::size_t sites) const;

    TransportSetup with_resolution(const Resolution& resolution) const;
    TransportSetup with_duration(double duration) const;

    double duration() const noexcept { return duration_; }
    double depth() const noexcept { return depth_; }
    double time_step() const noexcept { return dt_; }
    const LatticeSpec& lattice() const noexcept { return lattice_; }
    const Resolution& resolution() const noexcept { return resolution_; }
    double trap_omega() const noexcept { return omega_; }
    const WaveFunction& initial() const noexcept { return initial_; }
    PotentialField field(std::span<const double> coefficients) const;

private:
    LatticeSpec lattice_;
    double duration_;
    double depth_;
    double waist_;
    Resolution resolution_;
    GridPtr grid_;
    WaveFunction initial_;
    EigenSet origin_;
    EigenSet target_;
    double omega_ = 0.0;
    double dt_ = 0.0;
};

struct BandMapOutcome {
    double transported_fidelity = 0.0;  // overlap with the first excited level of the merged well
    double stationary_fidelity = 0.0;   // overlap with its ground level
    double infidelity = 1.0;            // 1 - product
    double clamp_violation = 0.0;
    Trajectory transported;
    Trajectory stationary;
};

// Two atoms in neighbouring wells; the left one is carried into the right well
// by a tweezer that is ramped down while an auxiliary tweezer holds the right well.
class BandMapSetup {
public:
    BandMapSetup(const LatticeSpec& lattice, const BandMapSpec& spec, const Resolution& resolution = {});

    BandMapOutcome run(std::span<const double> depth_coefficients, std::span<const double> position_coefficients,
                       const ErrorInjection& errors = {}, std::size_t frames = 0) const;
    // Coefficients packed as K depth harmonics followed by K position harmonics.
    BandMapOutcome run_packed(std::span<const double> packed, const ErrorInjection& errors = {},
                              std::size_t frames = 0) const;

    BandMapSetup with_resolution(const Resolution& resolution) const;

    const BandMapSpec& spec() const noexcept { return spec_; }
    const LatticeSpec& lattice() const noexcept { return lattice_; }
    const Resolution& resolution() const noexcept { return resolution_; }
    double time_step() const noexcept { return dt_; }
    const GridPtr& grid() const noexcept { return grid_; }
    const WaveFunction& transported_initial() const noexcept { return left_; }
    const WaveFunction& stationary_initial() const noexcept { return right_; }
    const WaveFunction& transported_target() const noexcept { return target_excited_; }
    const WaveFunction& stationary_target() const noexcept { return target_ground_; }
    PotentialField field(const BandMapRamps& ramps) const;

private:
    // Atoms prepared in the starting potential; a static error is already
    // present then, so the transport tweezer carries it.
    std::pair<WaveFunction, WaveFunction> initial_states(const ErrorInjection& errors) const;

    LatticeSpec lattice_;
    BandMapSpec spec_;
    Resolution resolution_;
    GridPtr grid_;
    WaveFunction left_;
    WaveFunction right_;
    WaveFunction target_ground_;
    WaveFunction target_excited_;
    double dt_ = 0.0;
};

// Angular frequency of a lattice site along one axis in internal units.
double lattice_omega(const LatticeSpec& lattice);

// Period (in samples) of the strongest oscillation of a series after removing
// a least-squares straight line: peak of the DFT power, refined by a parabola
// through the neighbouring bins. Needs at least 8 samples.
double dominant_period(std::span<const double> series);

// Propagator health in a static potential: norm drift per step and overall,
// and relative drift of <H> between start and end of the run.
struct HygieneReport {
    double max_step_norm_drift = 0.0;
    double norm_drift = 0.0;
    double energy_drift = 0.0;
    double periods = 0.0;
    std::size_t steps = 0;

    static constexpr double step_norm_limit = 1e-12;
    static constexpr double norm_limit = 1e-9;
    static constexpr double energy_limit = 1e-8;

    bool passed() const noexcept {
        return max_step_norm_drift < step_norm_limit && norm_drift < norm_limit && energy_drift < energy_limit;
    }
};

// Runs `psi` for `periods` periods of `omega` in a static field at the usual
// step of period / steps_per_period.
HygieneReport numerics_hygiene(const PotentialField& field, const WaveFunction& psi, double omega,
                               double steps_per_period = 100.0, double periods = 100.0);

// A reported quantity at the working and at doubled resolution. Agreement means
// a change below 10 % of the value or 1e-5 absolute, whichever is larger.
struct ConvergenceCheck {
    double coarse = 0.0;
    double refined = 0.0;

    double tolerance() const noexcept;
    bool agrees() const noexcept;
};

}  // namespace tweezer
