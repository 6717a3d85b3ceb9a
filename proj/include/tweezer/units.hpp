#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace tweezer {

namespace codata {
inline constexpr double h = 6.62607015e-34;  // J s
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double c = 299792458.0;                  // m/s
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double bohr_radius = 5.29177210903e-11;       // m
inline constexpr double gauss = 1e-4;                          // T
}  // namespace codata

// A ground-state to excited-state fine-structure line.
struct OpticalLine {
    std::string_view name;
    double wavelength = 0.0;  // m, vacuum
    double linewidth = 0.0;   // s^-1, partial decay rate back to the ground state
    int upper_j_twice = 1;    // 2J' of the excited level

    double angular_frequency() const noexcept {
        return 2.0 * std::numbers::pi * codata::c / wavelength;
    }
};

struct SpeciesData {
    std::string_view name;
    double mass = 0.0;                  // kg
    double hyperfine_splitting = 0.0;   // Hz, ground state F=2 - F=1
    double nuclear_spin = 1.5;
    OpticalLine line_half;              // tweezer line to the J'=1/2 level
    OpticalLine line_three_half;        // tweezer line to the J'=3/2 level
    OpticalLine lattice_line_half;      // D1, for far-detuned lattice light
    OpticalLine lattice_line_three_half;  // D2
    double bohr_magneton = codata::bohr_magneton;
    double scattering_length_up_up = 0.0;      // m
    double scattering_length_down_down = 0.0;  // m
    double scattering_length_up_down = 0.0;    // m
    double scattering_length_background = 0.0;  // m, clock and field-sensitive pairs
    double interaction_ratio = 0.0;  // U_upup / U_updown at feshbach_field
    double feshbach_field = 0.0;     // G
    double magic_field = 0.0;        // G, clock pair

    // Throws DomainError if an invariant is violated.
    void validate() const;
};

const SpeciesData& rubidium87();

// h^2 / (2 m lambda^2) in joules.
double recoil_energy(double wavelength, double mass);

// Lattice-recoil unit system. Lengths are in lattice spacings a_lat = lambda/2,
// energies in E_r, times in hbar/E_r. In these units hbar = 1 and the kinetic
// operator is -(1/pi^2) d^2/dx^2, i.e. the particle mass is pi^2/2.
class UnitSystem {
public:
    UnitSystem(double lattice_wavelength, double mass);

    static UnitSystem standard();  // 1064 nm lattice, 87Rb

    static constexpr double mass_internal = std::numbers::pi * std::numbers::pi / 2.0;

    double lattice_wavelength() const noexcept { return wavelength_; }
    double mass() const noexcept { return mass_; }
    double length() const noexcept { return length_; }  // m per a_lat
    double energy() const noexcept { return energy_; }  // J per E_r
    double time() const noexcept { return time_; }      // s per hbar/E_r
    double recoil_frequency() const noexcept { return energy_ / codata::h; }  // Hz

    double to_si_length(double x) const noexcept { return x * length_; }
    double from_si_length(double meters) const noexcept { return meters / length_; }
    double to_si_energy(double e) const noexcept { return e * energy_; }
    double from_si_energy(double joules) const noexcept { return joules / energy_; }
    double to_si_time(double t) const noexcept { return t * time_; }
    double from_si_time(double seconds) const noexcept { return seconds / time_; }

    // Angular frequency in internal units (1/time) <-> rad/s.
    double to_si_angular(double w) const noexcept { return w / time_; }
    double from_si_angular(double rad_per_s) const noexcept { return rad_per_s * time_; }

    // Energies quoted as E/h in Hz.
    double energy_from_hz(double hz) const noexcept { return hz * codata::h / energy_; }
    double energy_to_hz(double e) const noexcept { return e * energy_ / codata::h; }

    double microseconds(double us) const noexcept { return from_si_time(us * 1e-6); }
    double to_microseconds(double t) const noexcept { return to_si_time(t) * 1e6; }

private:
    double wavelength_;
    double mass_;
    double length_;
    double energy_;
    double time_;
};

struct HyperfineState {
    int f = 1;
    int m_f = 0;

    // Lande g_F for an I=3/2 alkali ground state: +1/2 for F=2, -1/2 for F=1.
    double g_f() const;
};

enum class QubitPair {
    FieldSensitive,  // |F=2,m=-2> / |F=1,m=-1>, spin-dependent transport
    Clock,           // |F=1,m=-1> / |F=2,m=+1>
    Merge,           // |F=1,m=+1> / |F=2,m=-1>, Feshbach-tuned merge gate
};

enum class Spin { Up, Down };

struct QubitStates {
    HyperfineState up;
    HyperfineState down;

    const HyperfineState& operator[](Spin s) const noexcept { return s == Spin::Up ? up : down; }
};

QubitStates qubit_states(QubitPair pair);
QubitPair parse_qubit_pair(std::string_view id);
std::string_view to_string(QubitPair pair);

struct ZeemanRate {
    double energy_per_tesla = 0.0;  // |d(E_up - E_down)/dB|
    bool magic_field = false;       // first-order insensitive pair
};

ZeemanRate zeeman_splitting_rate(QubitPair pair, const SpeciesData& species = rubidium87());

// key=value audit dump of the constants and the standard configuration.
std::string constants_report(const UnitSystem& units, const SpeciesData& species);

}  // namespace tweezer
