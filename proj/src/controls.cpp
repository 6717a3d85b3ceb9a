#include "tweezer/controls.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "tweezer/errors.hpp"
#include "tweezer/harmonic.hpp"

namespace tweezer {

ProfileBase ProfileBase::constant(double value) {
    ProfileBase b;
    b.kind = Kind::Constant;
    b.from = value;
    b.to = value;
    return b;
}

ProfileBase ProfileBase::linear(double from, double to) {
    ProfileBase b;
    b.kind = Kind::Linear;
    b.from = from;
    b.to = to;
    return b;
}

Profile::Profile(ProfileBase base, std::vector<double> coefficients, double duration)
    : base_(base), coeffs_(std::move(coefficients)), duration_(duration) {
    if (coeffs_.size() > max_harmonics) throw DomainError("at most 32 harmonics are supported");
    if (!(duration_ > 0.0)) throw DomainError("profile duration must be positive");
}

double Profile::base_value(double t) const {
    if (reversed_) t = duration_ - t;
    switch (base_.kind) {
    case ProfileBase::Kind::Constant:
        return base_.from;
    case ProfileBase::Kind::Linear: {
        const double u = std::clamp(t / duration_, 0.0, 1.0);
        // exact at both ends
        return u >= 1.0 ? base_.to : base_.from + (base_.to - base_.from) * u;
    }
    case ProfileBase::Kind::ConstantXi: {
        if (base_.xi == 0.0) return 0.0;
        const double tc = std::clamp(t, 0.0, duration_);
        const double w = harmonic::frequency_profile(base_.xi, base_.omega_initial, tc);
        const double d = harmonic::tweezer_depth_for_frequency(w, UnitSystem::mass_internal,
                                                               base_.lattice_curvature, base_.waist);
        return std::max(d, 0.0);
    }
    }
    return 0.0;
}

double Profile::operator()(double t) const {
    double value = base_value(t);
    if (coeffs_.empty()) return value;
    const double tau = reversed_ ? duration_ - t : t;
    const double phase = std::numbers::pi * tau / duration_;
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        value += coeffs_[k] * std::sin(static_cast<double>(k + 1) * phase);
    return value;
}

Profile Profile::reversed() const {
    Profile p = *this;
    p.reversed_ = !reversed_;
    return p;
}

Profile harmonic_series(const ProfileBase& base, std::span<const double> coefficients, double duration) {
    return Profile(base, std::vector<double>(coefficients.begin(), coefficients.end()), duration);
}

void ErrorInjection::validate() const {
    if (!(intensity_scale > 0.0)) throw DomainError("intensity scale must be positive");
    if (!std::isfinite(pointing_offset)) throw DomainError("pointing offset must be finite");
}

ControlRamp::ControlRamp(double duration, Profile depth, Profile position, ErrorInjection errors)
    : duration_(duration), depth_(std::move(depth)), position_(std::move(position)), errors_(errors) {
    if (!(duration_ > 0.0)) throw DomainError("ramp duration must be positive");
    if (depth_.duration() != duration_ || position_.duration() != duration_)
        throw ShapeError("profile durations differ from the ramp duration");
    errors_.validate();
}

double ControlRamp::raw_depth(double t) const { return errors_.intensity_scale * depth_(t); }

double ControlRamp::depth(double t) const { return std::max(raw_depth(t), 0.0); }

double ControlRamp::position(double t) const { return position_(t) + errors_.pointing_offset; }

double ControlRamp::clamp_violation(std::size_t samples) const {
    if (samples < 2) samples = 2;
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = duration_ * static_cast<double>(i) / static_cast<double>(samples - 1);
        worst = std::max(worst, -raw_depth(t));
    }
    return worst;
}

ControlRamp ControlRamp::reversed() const {
    return ControlRamp(duration_, depth_.reversed(), position_.reversed(), errors_);
}

TweezerDrive ControlRamp::drive() const {
    auto self = std::make_shared<const ControlRamp>(*this);
    TweezerDrive d;
    d.depth = [self](double t) { return self->depth(t); };
    d.center = [self](double t) { return self->position(t); };
    return d;
}

ControlRamp inject_errors(const ControlRamp& ramp, const ErrorInjection& errors) {
    errors.validate();
    ErrorInjection combined = ramp.errors();
    combined.pointing_offset += errors.pointing_offset;
    combined.intensity_scale *= errors.intensity_scale;
    return ControlRamp(ramp.duration(), ramp.depth_profile(), ramp.position_profile(), combined);
}

ControlRamp transport_ramp(double duration, std::span<const double> coefficients, double depth, double from,
                           double to) {
    if (!(depth >= 0.0)) throw DomainError("transport depth must be non-negative");
    return ControlRamp(duration, Profile(ProfileBase::constant(depth), {}, duration),
                       harmonic_series(ProfileBase::linear(from, to), coefficients, duration));
}

ControlRamp rampup_ramp(double target_depth, double duration, const LatticeSpec& lattice, double waist,
                        double center) {
    if (target_depth < 0.0) throw DomainError("ramp target depth must be non-negative");
    lattice.validate();
    Profile position(ProfileBase::constant(center), {}, duration);
    if (target_depth == 0.0)
        return ControlRamp(duration, Profile(ProfileBase::constant(0.0), {}, duration), position);

    const double pi = std::numbers::pi;
    const double lattice_curvature = 2.0 * pi * pi * lattice.depth / (lattice.spacing * lattice.spacing);
    const double m = UnitSystem::mass_internal;
    const double omega_o = std::sqrt(lattice_curvature / m);
    const double omega_f = std::sqrt((lattice_curvature + 4.0 * target_depth / (waist * waist)) / m);
    if (!(omega_o > 0.0))
        throw DomainError("constant-xi ramp needs a confining lattice to start from");

    ProfileBase base;
    base.kind = ProfileBase::Kind::ConstantXi;
    base.xi = harmonic::adiabaticity_for_rampup(duration, omega_o, omega_f);
    base.omega_initial = omega_o;
    base.lattice_curvature = lattice_curvature;
    base.waist = waist;
    base.from = 0.0;
    base.to = target_depth;
    return ControlRamp(duration, Profile(base, {}, duration), position);
}

void BandMapSpec::validate() const {
    if (!(start_depth > 0.0) || !(aux_depth >= 0.0)) throw DomainError("band map depths must be positive");
    if (!(duration > 0.0)) throw DomainError("band map duration must be positive");
    if (harmonics == 0 || harmonics > max_harmonics)
        throw DomainError("band map harmonic count must be in [1, 32]");
    if (!(waist > 0.0)) throw DomainError("band map waist must be positive");
    if (left_site >= right_site) throw DomainError("band map moves from left to right");
}

BandMapSpec BandMapSpec::standard(const UnitSystem& units) {
    BandMapSpec s;
    s.duration = units.microseconds(75.0);
    return s;
}

BandMapRamps bandmap_ramp(const BandMapSpec& spec, std::span<const double> depth_coefficients,
                          std::span<const double> position_coefficients, const ErrorInjection& errors) {
    spec.validate();
    if (depth_coefficients.size() > spec.harmonics || position_coefficients.size() > spec.harmonics)
        throw DomainError("more coefficients than harmonics in the band map spec");
    ControlRamp transport(spec.duration,
                          harmonic_series(ProfileBase::linear(spec.start_depth, 0.0), depth_coefficients,
                                          spec.duration),
                          harmonic_series(ProfileBase::linear(spec.left_site, spec.right_site),
                                          position_coefficients, spec.duration),
                          errors);
    ControlRamp aux(spec.duration, Profile(ProfileBase::constant(spec.aux_depth), {}, spec.duration),
                    Profile(ProfileBase::constant(spec.right_site), {}, spec.duration));
    const bool clamped = transport.depth_clamped();
    return {std::move(transport), std::move(aux), clamped};
}

double harmonic_spatial_period(double displacement, std::size_t order) {
    if (order == 0) throw DomainError("harmonic order must be at least one");
    // sin(k pi t / T) has period 2T/k; along a uniform sweep that is 2d/k.
    return 2.0 * std::abs(displacement) / static_cast<double>(order);
}

}  // namespace tweezer
