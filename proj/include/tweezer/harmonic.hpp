#pragma once

// Closed-form two-level model of a harmonic trap whose frequency or position
// is changed at constant adiabaticity xi. Works in any consistent unit system
// (the rest of the library uses lattice-recoil units with hbar = 1).
namespace tweezer::harmonic {

struct AdiabaticityParams {
    double xi = 0.0;
    double omega_initial = 0.0;
    double omega_final = 0.0;
    double sigma = 0.0;            // oscillator length
    double rampup_time = 0.0;
    double transport_time = 0.0;

    void validate() const;  // xi > 0, omega_final >= omega_initial > 0
};

// Envelope 4 xi^2 / (1 + 4 xi^2) of both ramp-up and transport excitation.
double envelope_excitation(double xi);

// Total ramp time from omega_o to omega_f at constant xi.
double rampup_time(double xi, double omega_o, double omega_f);
// Inverse of rampup_time: the xi that completes the ramp in `duration`.
double adiabaticity_for_rampup(double duration, double omega_o, double omega_f);

// omega(t) = omega_o / (1 - 4 sqrt(2) xi omega_o t); DomainError past the pole.
double frequency_profile(double xi, double omega_o, double t);

// Excitation probability during a constant-xi ramp-up.
double rampup_excitation(double t, double xi, double omega_o);

struct TransportSpeed {
    double velocity = 0.0;
    double single_site_time = 0.0;  // spacing / velocity
};

// v = sqrt(2) xi sigma omega; `spacing` is the distance of one site.
TransportSpeed transport_velocity(double xi, double sigma, double omega, double spacing);

// Excitation probability during constant-velocity transport.
double transport_excitation(double t, double xi, double omega);

// Tweezer depth that gives total curvature m omega^2 on top of a lattice
// curvature, for a Gaussian of the given waist: m omega^2 = c_lat + 4 V / w^2.
double tweezer_depth_for_frequency(double omega, double mass, double lattice_curvature,
                                   double waist);

}  // namespace tweezer::harmonic
