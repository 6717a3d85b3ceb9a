#include "tweezer/units.hpp"

#include <cmath>
#include <sstream>

#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"

namespace tweezer {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SpeciesData make_rubidium87() {
    SpeciesData rb;
    rb.name = "87Rb";
    rb.mass = 86.909180531 * codata::atomic_mass_unit;
    rb.hyperfine_splitting = 6.834682610904e9;
    rb.nuclear_spin = 1.5;
    // 5S-6P partial decay rate of 6P3/2 from the reduced dipole element
    // 0.523 e a0 (Safronova et al., PRA 69, 022509). The J'=1/2 line is given
    // the same rate: the two-line light-shift model assumes the ideal 2:1
    // fine-structure line-strength ratio, which places the sigma-minus null
    // of |F=1,m=-1> at the frequency midpoint of the lines.
    rb.line_half = {"5S1/2-6P1/2", 421.555e-9, 1.87e6, 1};
    rb.line_three_half = {"5S1/2-6P3/2", 420.1733e-9, 1.87e6, 3};
    // D lines, Steck "Rubidium 87 D Line Data" rev. 2.2.1.
    rb.lattice_line_half = {"5S1/2-5P1/2", 794.978851e-9, two_pi * 5.7500e6, 1};
    rb.lattice_line_three_half = {"5S1/2-5P3/2", 780.241209e-9, two_pi * 6.0666e6, 3};
    rb.scattering_length_background = 100.4 * codata::bohr_radius;
    rb.interaction_ratio = 0.9;
    rb.scattering_length_up_up = rb.scattering_length_background;
    rb.scattering_length_down_down = rb.scattering_length_background;
    rb.scattering_length_up_down = rb.scattering_length_background / rb.interaction_ratio;
    rb.feshbach_field = 9.12;
    rb.magic_field = 3.229;
    return rb;
}

}  // namespace

void SpeciesData::validate() const {
    if (!(mass > 0.0)) throw DomainError("species mass must be positive");
    if (!(line_three_half.wavelength < line_half.wavelength))
        throw DomainError("J'=3/2 line must lie at shorter wavelength than J'=1/2");
    if (!(interaction_ratio > 0.0 && interaction_ratio < 1.0))
        throw DomainError("interaction ratio must lie in (0, 1)");
}

const SpeciesData& rubidium87() {
    static const SpeciesData rb = [] {
        auto s = make_rubidium87();
        s.validate();
        return s;
    }();
    return rb;
}

double recoil_energy(double wavelength, double mass) {
    if (!(wavelength > 0.0) || !(mass > 0.0))
        throw DomainError("recoil_energy: wavelength and mass must be positive");
    return codata::h * codata::h / (2.0 * mass * wavelength * wavelength);
}

UnitSystem::UnitSystem(double lattice_wavelength, double mass)
    : wavelength_(lattice_wavelength),
      mass_(mass),
      length_(lattice_wavelength / 2.0),
      energy_(recoil_energy(lattice_wavelength, mass)),
      time_(codata::hbar / energy_) {}

UnitSystem UnitSystem::standard() { return UnitSystem(1064e-9, rubidium87().mass); }

double HyperfineState::g_f() const {
    if (f == 2) return 0.5;
    if (f == 1) return -0.5;
    throw UnsupportedStatesError("g_F defined only for F=1 and F=2");
}

QubitStates qubit_states(QubitPair pair) {
    switch (pair) {
        case QubitPair::FieldSensitive: return {{2, -2}, {1, -1}};
        case QubitPair::Clock: return {{2, 1}, {1, -1}};
        case QubitPair::Merge: return {{1, 1}, {2, -1}};
    }
    throw UnsupportedStatesError("unknown qubit pair");
}

QubitPair parse_qubit_pair(std::string_view id) {
    if (id == "field-sensitive") return QubitPair::FieldSensitive;
    if (id == "clock") return QubitPair::Clock;
    if (id == "merge") return QubitPair::Merge;
    throw UnsupportedStatesError("unsupported qubit pair '" + std::string(id) + "'");
}

std::string_view to_string(QubitPair pair) {
    switch (pair) {
        case QubitPair::FieldSensitive: return "field-sensitive";
        case QubitPair::Clock: return "clock";
        case QubitPair::Merge: return "merge";
    }
    return "unknown";
}

ZeemanRate zeeman_splitting_rate(QubitPair pair, const SpeciesData& species) {
    const auto states = qubit_states(pair);
    const double up = states.up.g_f() * states.up.m_f;
    const double down = states.down.g_f() * states.down.m_f;
    ZeemanRate rate;
    rate.energy_per_tesla = std::abs(up - down) * species.bohr_magneton;
    rate.magic_field = rate.energy_per_tesla == 0.0;
    return rate;
}

std::string constants_report(const UnitSystem& units, const SpeciesData& species) {
    std::ostringstream out;
    auto kv = [&](std::string_view key, double value) {
        out << key << '=' << format_double(value) << '\n';
    };
    out << "species=" << species.name << '\n';
    kv("mass_kg", species.mass);
    kv("lattice_wavelength_m", units.lattice_wavelength());
    kv("lattice_spacing_m", units.length());
    kv("recoil_energy_J", units.energy());
    kv("recoil_frequency_Hz", units.recoil_frequency());
    kv("time_unit_s", units.time());
    kv("hyperfine_splitting_Hz", species.hyperfine_splitting);
    kv("line_half_wavelength_m", species.line_half.wavelength);
    kv("line_half_linewidth_per_s", species.line_half.linewidth);
    kv("line_three_half_wavelength_m", species.line_three_half.wavelength);
    kv("line_three_half_linewidth_per_s", species.line_three_half.linewidth);
    kv("bohr_magneton_J_per_T", species.bohr_magneton);
    kv("scattering_length_background_m", species.scattering_length_background);
    kv("scattering_length_up_down_m", species.scattering_length_up_down);
    kv("interaction_ratio", species.interaction_ratio);
    kv("feshbach_field_G", species.feshbach_field);
    kv("magic_field_G", species.magic_field);
    const auto zs = zeeman_splitting_rate(QubitPair::FieldSensitive, species);
    kv("zeeman_field_sensitive_Hz_per_mG", zs.energy_per_tesla * codata::gauss * 1e-3 / codata::h);
    kv("lattice_depth_Er", 50.0);
    kv("tweezer_depth_Er", 500.0);
    kv("tweezer_waist_alat", 0.5);
    kv("tweezer_depth_500Er_Hz", units.to_si_energy(500.0) / codata::h);
    return out.str();
}

}  // namespace tweezer
