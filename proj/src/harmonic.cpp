#include "tweezer/harmonic.hpp"

#include <cmath>
#include <numbers>

#include "tweezer/errors.hpp"

namespace tweezer::harmonic {

namespace {
const double four_sqrt2 = 4.0 * std::numbers::sqrt2;
}

void AdiabaticityParams::validate() const {
    if (!(xi > 0.0)) throw DomainError("adiabaticity parameter must be positive");
    if (!(omega_initial > 0.0) || !(omega_final >= omega_initial))
        throw DomainError("need omega_final >= omega_initial > 0");
}

double envelope_excitation(double xi) {
    if (std::isinf(xi)) return 1.0;
    const double a = 4.0 * xi * xi;
    return a / (1.0 + a);
}

double rampup_time(double xi, double omega_o, double omega_f) {
    if (!(xi > 0.0) || !(omega_o > 0.0)) throw DomainError("rampup_time: xi and omega_o must be positive");
    if (omega_f < omega_o) throw DomainError("rampup_time: only ramp-up (omega_f >= omega_o) is modeled");
    return (1.0 - omega_o / omega_f) / (four_sqrt2 * xi * omega_o);
}

double adiabaticity_for_rampup(double duration, double omega_o, double omega_f) {
    if (!(duration > 0.0) || !(omega_o > 0.0)) throw DomainError("adiabaticity_for_rampup: invalid input");
    if (omega_f < omega_o) throw DomainError("adiabaticity_for_rampup: only ramp-up is modeled");
    return (1.0 - omega_o / omega_f) / (four_sqrt2 * duration * omega_o);
}

double frequency_profile(double xi, double omega_o, double t) {
    const double denom = 1.0 - four_sqrt2 * xi * omega_o * t;
    if (!(denom > 0.0)) throw DomainError("frequency_profile: t beyond the pole");
    return omega_o / denom;
}

double rampup_excitation(double t, double xi, double omega_o) {
    const double arg = 1.0 - four_sqrt2 * t * xi * omega_o;
    if (!(arg > 0.0)) throw DomainError("rampup_excitation: t beyond the pole");
    if (xi == 0.0) return 0.0;
    const double s = std::sin(std::sqrt(2.0 * xi * xi + 0.5) * std::log(arg) / (4.0 * xi));
    return envelope_excitation(xi) * s * s;
}

TransportSpeed transport_velocity(double xi, double sigma, double omega, double spacing) {
    if (!(xi > 0.0) || !(sigma > 0.0) || !(omega > 0.0) || !(spacing > 0.0))
        throw DomainError("transport_velocity: inputs must be positive");
    TransportSpeed s;
    s.velocity = std::numbers::sqrt2 * xi * sigma * omega;
    s.single_site_time = spacing / s.velocity;
    return s;
}

double transport_excitation(double t, double xi, double omega) {
    const double s = std::sin(std::sqrt(1.0 + 4.0 * xi * xi) * omega * t / 2.0);
    return envelope_excitation(xi) * s * s;
}

double tweezer_depth_for_frequency(double omega, double mass, double lattice_curvature,
                                   double waist) {
    return (mass * omega * omega - lattice_curvature) * waist * waist / 4.0;
}

}  // namespace tweezer::harmonic
