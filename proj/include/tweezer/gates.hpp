#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tweezer/dynamics.hpp"
#include "tweezer/units.hpp"

// Gate-level bookkeeping on top of single-atom dynamics. Energies and times
// are in internal units (E_r and hbar/E_r) unless a name says otherwise.
namespace tweezer {

struct QubitState {
    complex up{1.0, 0.0};
    complex down{0.0, 0.0};
    QubitPair pair = QubitPair::FieldSensitive;

    void validate() const;  // |up|^2 + |down|^2 = 1 within 1e-12
};

// Two atoms, the first in the ground and the second in the first excited
// vibrational level of one well. Product-basis order: up-up, up-down,
// down-up, down-down (spin of the ground-level atom first).
struct TwoQubitState {
    std::array<complex, 4> amplitudes{};

    enum Index : std::size_t { UpUp = 0, UpDown = 1, DownUp = 2, DownDown = 3 };

    double norm_squared() const noexcept;
    void validate() const;
    static TwoQubitState product(const QubitState& ground, const QubitState& excited);
};

// Normalized singlet/triplet components,
// s = (ud - du)/sqrt2, t0 = (ud + du)/sqrt2, t+ = uu, t- = dd.
struct SingletTriplet {
    complex singlet;
    complex t0;
    complex t_plus;
    complex t_minus;
};

SingletTriplet to_singlet_triplet(const TwoQubitState& psi);
TwoQubitState from_singlet_triplet(const SingletTriplet& st);

// Ratio of the ground/excited to ground/ground interaction integrals for
// harmonic oscillator levels.
inline constexpr double excited_ground_ratio = 0.35;

struct InteractionParams {
    double u_gg = 0.0;
    double u_up_down = 0.0;
    double u_up_up = 0.0;
    double u_down_down = 0.0;
    double magnetic_field = 0.0;  // G

    double u_eg() const noexcept { return excited_ground_ratio * u_gg; }
    void validate() const;
};

struct TransverseFrequencies {
    double y = 0.0;
    double z = 0.0;
};

// Same-well interaction energies of two atoms sharing `ground`, using the
// species scattering lengths (background for u_gg) at the Feshbach field.
InteractionParams interaction_params(const WaveFunction& ground, const TransverseFrequencies& transverse,
                                     const SpeciesData& species, const UnitSystem& units);

// U = 2 a_s sqrt(w_y w_z) * integral |psi_a|^2 |psi_b|^2 dx, i.e. the contact
// interaction g = 4 pi hbar^2 a_s / m with Gaussian ground-state factors in the
// two transverse directions. `scattering_length` in lattice spacings.
double interaction_energy(const WaveFunction& psi_a, const WaveFunction& psi_b, double scattering_length,
                          const TransverseFrequencies& transverse);

// Transverse frequencies at a point on the transport axis: the lattice beam
// along one axis, lattice plus the given tweezers in the plane.
TransverseFrequencies transverse_frequencies(const LatticeSpec& lattice, const PotentialField& field, double x,
                                             double t = 0.0);

// pi hbar / |U_cross - U_same|; NoGateError when the two are equal.
double merge_gate_phase_time(double u_same, double u_cross);

// target_phase hbar / U; DomainError for U <= 0.
double phase_gate_time(double interaction, double target_phase);

struct SwapTimes {
    double u_eg = 0.0;
    double swap = 0.0;       // pi hbar / U_eg
    double entangling = 0.0; // swap / 2
};

SwapTimes swap_times(double u_gg);

// Singlet unchanged; triplet components pick up exp(i U_eg t / hbar).
TwoQubitState spin_exchange_evolve(const TwoQubitState& psi, double u_eg, double t);

using TransverseSchedule = std::function<TransverseFrequencies(double t)>;

// (1/hbar) * integral U(t) dt over the shared frame times of two trajectories
// (trapezoidal rule).
double bandmap_interaction_phase(const Trajectory& a, const Trajectory& b, double scattering_length,
                                 const TransverseSchedule& transverse);

enum class GateKind { TransportPhase, Exchange };

GateKind parse_gate_kind(std::string_view id);
std::string_view to_string(GateKind kind);

// Durations of the building blocks in microseconds.
struct StepDurations {
    double ramp = 11.0;
    double transport = 25.0;
    double phase_hold = 83.0;
    double swap_hold = 125.0;
    double merge = 75.0;
};

struct BudgetStep {
    std::string name;
    std::size_t count = 0;
    double unit_us = 0.0;
};

struct GateBudget {
    GateKind gate = GateKind::TransportPhase;
    std::size_t sites = 0;
    std::vector<BudgetStep> steps;

    double total_us() const noexcept;
    // Aligned step/amount/time table with an overall line.
    std::string table() const;
};

GateBudget gate_budget(GateKind gate, std::size_t sites, const StepDurations& durations = {});

// Closed forms: 199 + 50 n and 297 + 50 n microseconds for the default durations.
double gate_budget_closed_form(GateKind gate, std::size_t sites);

struct SequenceStep {
    std::string action;
    double duration_us = 0.0;
    std::string moving;         // which spin components are displaced
    std::string potentials;     // which tweezers act on which spin
    bool echo_pulse = false;    // a pi pulse is applied at the end of this step
    std::size_t ramps = 0;      // ramp units contained in the step
    std::size_t transports = 0; // single-site transport units contained in the step
};

// Step-by-step schedule of the spin-dependent transport gate over n sites.
std::vector<SequenceStep> spin_dependent_gate_sequence(std::size_t sites, const StepDurations& durations = {});

}  // namespace tweezer
