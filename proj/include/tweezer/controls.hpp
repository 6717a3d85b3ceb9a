#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tweezer/potentials.hpp"

namespace tweezer {

inline constexpr std::size_t max_harmonics = 32;

// Base shape of a control profile over [0, T].
struct ProfileBase {
    enum class Kind { Constant, Linear, ConstantXi };
    Kind kind = Kind::Constant;
    double from = 0.0;  // Constant: value; Linear: value at t=0
    double to = 0.0;    // Linear: value at t=T
    // ConstantXi: tweezer depth reproducing omega(t) = omega_o / (1 - 4 sqrt2 xi omega_o t)
    // on top of a lattice curvature.
    double xi = 0.0;
    double omega_initial = 0.0;
    double lattice_curvature = 0.0;
    double waist = 0.5;

    static ProfileBase constant(double value);
    static ProfileBase linear(double from, double to);
};

// f(t) = base(t) + sum_k c_k sin(k pi t / T). Half-range sines leave the
// endpoint values untouched.
class Profile {
public:
    Profile() = default;
    Profile(ProfileBase base, std::vector<double> coefficients, double duration);

    double operator()(double t) const;
    double base_value(double t) const;
    double duration() const noexcept { return duration_; }
    const ProfileBase& base() const noexcept { return base_; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }
    Profile reversed() const;

private:
    ProfileBase base_;
    std::vector<double> coeffs_;
    double duration_ = 0.0;
    bool reversed_ = false;
};

Profile harmonic_series(const ProfileBase& base, std::span<const double> coefficients, double duration);

struct ErrorInjection {
    double pointing_offset = 0.0;  // a_lat, static
    double intensity_scale = 1.0;  // multiplicative, static

    void validate() const;
};

// Time-dependent depth and centre of one tweezer. Depths below zero are
// clamped when evaluated; depth_clamped reports whether that happens.
class ControlRamp {
public:
    ControlRamp(double duration, Profile depth, Profile position, ErrorInjection errors = {});

    double duration() const noexcept { return duration_; }
    double depth(double t) const;      // clamped at zero, error-scaled
    double raw_depth(double t) const;  // unclamped, error-scaled
    double position(double t) const;   // error-offset
    const Profile& depth_profile() const noexcept { return depth_; }
    const Profile& position_profile() const noexcept { return position_; }
    const ErrorInjection& errors() const noexcept { return errors_; }

    // Most negative raw depth over `samples` evenly spaced times (0 if none).
    double clamp_violation(std::size_t samples = 2001) const;
    bool depth_clamped(std::size_t samples = 2001) const { return clamp_violation(samples) > 0.0; }

    ControlRamp reversed() const;
    TweezerDrive drive() const;

private:
    double duration_;
    Profile depth_;
    Profile position_;
    ErrorInjection errors_;
};

ControlRamp inject_errors(const ControlRamp& ramp, const ErrorInjection& errors);

// Constant-depth translation from `from` to `to` with position harmonics.
ControlRamp transport_ramp(double duration, std::span<const double> coefficients, double depth = 500.0,
                           double from = 0.0, double to = 1.0);

// Constant-xi ramp of a tweezer of the given waist from zero to `target_depth`
// on a lattice site; xi follows from the duration and the initial and final
// harmonic frequencies.
ControlRamp rampup_ramp(double target_depth, double duration, const LatticeSpec& lattice, double waist = 0.5,
                        double center = 0.0);

struct BandMapSpec {
    double start_depth = 400.0;
    double aux_depth = 200.0;
    double duration = 0.0;  // internal time units
    std::size_t harmonics = 15;
    double left_site = -1.0;
    double right_site = 0.0;
    double waist = 0.5;

    void validate() const;
    static BandMapSpec standard(const UnitSystem& units);  // 75 us, 400/200 E_r, K=15
};

struct BandMapRamps {
    ControlRamp transport;
    ControlRamp auxiliary;
    bool clamped = false;
};

// Transport tweezer: depth start->0 and position left->right, both with
// harmonics. Auxiliary tweezer: constant depth on the right site.
BandMapRamps bandmap_ramp(const BandMapSpec& spec, std::span<const double> depth_coefficients,
                          std::span<const double> position_coefficients, const ErrorInjection& errors = {});

// Spatial period of the highest position harmonic over a displacement.
double harmonic_spatial_period(double displacement, std::size_t order);

}  // namespace tweezer
