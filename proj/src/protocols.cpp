#include "tweezer/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "tweezer/errors.hpp"

namespace tweezer {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::size_t lowest_states_for_search = 12;

double combined_omega(const LatticeSpec& lattice, double depth, double waist) {
    const double curvature = 2.0 * pi * pi * lattice.depth / (lattice.spacing * lattice.spacing) +
                             4.0 * depth / (waist * waist);
    return std::sqrt(curvature / UnitSystem::mass_internal);
}

// Lowest eigenstate with most of its weight on the given site.
const WaveFunction& lowest_on_site(const EigenSet& set, double center, double half_width) {
    for (const WaveFunction& state : set.states)
        if (state.weight_in(center - half_width, center + half_width) > 0.5) return state;
    throw GeometryError("no low-lying state is localized on the requested site");
}

}  // namespace

double lattice_omega(const LatticeSpec& lattice) { return combined_omega(lattice, 0.0, 1.0); }

void Resolution::validate() const {
    if (sites < 7) throw DomainError("resolution needs at least seven sites");
    if (points_per_site < 8) throw DomainError("resolution needs at least eight points per site");
    if (!(steps_per_period >= 10.0)) throw DomainError("resolution needs at least ten steps per period");
}

Resolution Resolution::transport() {
    Resolution r;
    r.steps_per_period = 400.0;
    return r;
}

Resolution Resolution::doubled() const {
    Resolution r = *this;
    r.points_per_site *= 2;
    r.steps_per_period *= 2.0;
    return r;
}

RampupSetup::RampupSetup(const LatticeSpec& lattice, double target_depth, double waist,
                         const Resolution& resolution)
    : lattice_(lattice),
      target_depth_(target_depth),
      waist_(waist),
      resolution_(resolution),
      grid_(Grid::around(0.0, 0.0, resolution.sites, resolution.points_per_site)),
      initial_(site_ground_state(lattice, grid_, 0.0)) {
    resolution_.validate();
    if (!(target_depth > 0.0)) throw DomainError("ramp target depth must be positive");
    TweezerSpec tweezer;
    tweezer.depth = target_depth;
    tweezer.waist = waist;
    final_field_.add_lattice(lattice).add_tweezer(tweezer);
    reference_ = stationary_states(final_field_, grid_, 2);
    omega_initial_ = lattice_omega(lattice);
    omega_final_ = combined_omega(lattice, target_depth, waist);
    dt_ = default_time_step(omega_final_, resolution_.steps_per_period);
}

PotentialField RampupSetup::field(double duration) const {
    const ControlRamp ramp = rampup_ramp(target_depth_, duration, lattice_, waist_);
    TweezerSpec tweezer;
    tweezer.depth = 0.0;
    tweezer.waist = waist_;
    PotentialField f;
    f.add_lattice(lattice_).add_tweezer(tweezer, ramp.drive());
    return f;
}

Trajectory RampupSetup::run(double duration, std::size_t frames) const {
    PropagationOptions options;
    options.dt = dt_;
    options.frames = frames;
    return propagate(initial_, field(duration), 0.0, duration, options);
}

double RampupSetup::excitation(double duration) const {
    return excitation_probability(run(duration, 0).final_state, reference_);
}

TransportSetup::TransportSetup(const LatticeSpec& lattice, double duration, double depth, double waist,
                               const Resolution& resolution)
    : lattice_(lattice),
      duration_(duration),
      depth_(depth),
      waist_(waist),
      resolution_(resolution),
      grid_(Grid::around(0.0, lattice.spacing, resolution.sites, resolution.points_per_site)),
      initial_(grid_) {
    resolution_.validate();
    if (!(duration > 0.0)) throw DomainError("transport duration must be positive");
    if (!(depth > 0.0)) throw DomainError("transport depth must be positive");
    auto static_field = [&](double center) {
        TweezerSpec t;
        t.depth = depth;
        t.waist = waist;
        t.center = center;
        PotentialField f;
        f.add_lattice(lattice).add_tweezer(t);
        return f;
    };
    origin_ = stationary_states(static_field(0.0), grid_, 2);
    target_ = stationary_states(static_field(lattice.spacing), grid_, 2);
    initial_ = origin_.ground();
    omega_ = combined_omega(lattice, depth, waist);
    dt_ = default_time_step(omega_, resolution_.steps_per_period);
}

PotentialField TransportSetup::field(std::span<const double> coefficients) const {
    const ControlRamp ramp = transport_ramp(duration_, coefficients, depth_, 0.0, lattice_.spacing);
    TweezerSpec t;
    t.depth = depth_;
    t.waist = waist_;
    PotentialField f;
    f.add_lattice(lattice_).add_tweezer(t, ramp.drive());
    return f;
}

TransportRun TransportSetup::run(std::span<const double> coefficients, std::size_t frames) const {
    PropagationOptions options;
    options.dt = dt_;
    options.frames = frames;
    TransportRun out;
    out.trajectory = propagate(initial_, field(coefficients), 0.0, duration_, options);
    out.excitation = excitation_probability(out.trajectory.final_state, target_);
    return out;
}

double TransportSetup::excitation(std::span<const double> coefficients) const {
    return run(coefficients, 0).excitation;
}

std::vector<double> TransportSetup::multisite(std::span<const double> coefficients, std::size_t sites) const {
    const PotentialField f = field(coefficients);
    const double spacing_points = lattice_.spacing / grid_->dx();
    const auto shift = static_cast<std::ptrdiff_t>(std::lround(spacing_points));
    if (std::abs(spacing_points - static_cast<double>(shift)) > 1e-9)
        throw GeometryError("lattice spacing is not a whole number of grid points");
    PropagationOptions options;
    options.dt = dt_;
    std::vector<double> errors;
    errors.reserve(sites);
    WaveFunction psi = initial_;
    for (std::size_t n = 0; n < sites; ++n) {
        psi = propagate(psi, f, 0.0, duration_, options).final_state;
        // translate back by one spacing so the next step starts from the same place;
        // amplitude left behind in the leftmost site would wrap around, so drop it
        psi.roll(-shift);
        const std::size_t n_points = psi.size();
        for (std::size_t i = n_points - static_cast<std::size_t>(shift); i < n_points; ++i) psi[i] = 0.0;
        errors.push_back(excitation_probability(psi, origin_));
    }
    return errors;
}

TransportSetup TransportSetup::with_resolution(const Resolution& resolution) const {
    return TransportSetup(lattice_, duration_, depth_, waist_, resolution);
}

TransportSetup TransportSetup::with_duration(double duration) const {
    return TransportSetup(lattice_, duration, depth_, waist_, resolution_);
}

BandMapSetup::BandMapSetup(const LatticeSpec& lattice, const BandMapSpec& spec, const Resolution& resolution)
    : lattice_(lattice),
      spec_(spec),
      resolution_(resolution),
      grid_(Grid::around(spec.left_site, spec.right_site, resolution.sites, resolution.points_per_site)),
      left_(grid_),
      right_(grid_),
      target_ground_(grid_),
      target_excited_(grid_) {
    resolution_.validate();
    spec_.validate();
    std::tie(left_, right_) = initial_states({});

    TweezerSpec aux;
    aux.depth = spec.aux_depth;
    aux.waist = spec.waist;
    aux.center = spec.right_site;
    PotentialField end;
    end.add_lattice(lattice).add_tweezer(aux);
    const EigenSet merged = stationary_states(end, grid_, 2);
    target_ground_ = merged.states[0];
    target_excited_ = merged.states[1];
    const double w_right = 0.5 * lattice.spacing;
    if (merged.states[1].weight_in(spec.right_site - w_right, spec.right_site + w_right) < 0.9)
        throw GeometryError("first excited level of the merged well is not localized on the right site");

    dt_ = default_time_step(combined_omega(lattice, std::max(spec.start_depth, spec.aux_depth), spec.waist),
                            resolution_.steps_per_period);
}

std::pair<WaveFunction, WaveFunction> BandMapSetup::initial_states(const ErrorInjection& errors) const {
    TweezerSpec transport;
    transport.depth = errors.intensity_scale * spec_.start_depth;
    transport.waist = spec_.waist;
    transport.center = spec_.left_site + errors.pointing_offset;
    TweezerSpec aux;
    aux.depth = spec_.aux_depth;
    aux.waist = spec_.waist;
    aux.center = spec_.right_site;

    PotentialField start;
    start.add_lattice(lattice_).add_tweezer(transport).add_tweezer(aux);
    const EigenSet initial = stationary_states(start, grid_, lowest_states_for_search);
    const double half = 0.5 * lattice_.spacing;
    return {lowest_on_site(initial, spec_.left_site, half), lowest_on_site(initial, spec_.right_site, half)};
}

PotentialField BandMapSetup::field(const BandMapRamps& ramps) const {
    TweezerSpec transport;
    transport.waist = spec_.waist;
    TweezerSpec aux;
    aux.depth = spec_.aux_depth;
    aux.waist = spec_.waist;
    aux.center = spec_.right_site;
    PotentialField f;
    f.add_lattice(lattice_).add_tweezer(transport, ramps.transport.drive()).add_tweezer(aux);
    return f;
}

BandMapOutcome BandMapSetup::run(std::span<const double> depth_coefficients,
                                 std::span<const double> position_coefficients, const ErrorInjection& errors,
                                 std::size_t frames) const {
    const BandMapRamps ramps = bandmap_ramp(spec_, depth_coefficients, position_coefficients, errors);
    PropagationOptions options;
    options.dt = dt_;
    options.frames = frames;
    std::vector<WaveFunction> initial{left_, right_};
    if (errors.pointing_offset != 0.0 || errors.intensity_scale != 1.0) {
        auto [left, right] = initial_states(errors);
        initial = {std::move(left), std::move(right)};
    }
    auto trajectories = propagate_many(initial, field(ramps), 0.0, spec_.duration, options);

    BandMapOutcome out;
    out.clamp_violation = ramps.transport.clamp_violation();
    out.transported_fidelity = overlap_fidelity(trajectories[0].final_state, target_excited_);
    out.stationary_fidelity = overlap_fidelity(trajectories[1].final_state, target_ground_);
    out.infidelity = 1.0 - out.transported_fidelity * out.stationary_fidelity;
    out.transported = std::move(trajectories[0]);
    out.stationary = std::move(trajectories[1]);
    return out;
}

BandMapOutcome BandMapSetup::run_packed(std::span<const double> packed, const ErrorInjection& errors,
                                        std::size_t frames) const {
    if (packed.size() % 2 != 0) throw ShapeError("packed band map coefficients must have even length");
    const std::size_t k = packed.size() / 2;
    return run(packed.subspan(0, k), packed.subspan(k), errors, frames);
}

BandMapSetup BandMapSetup::with_resolution(const Resolution& resolution) const {
    return BandMapSetup(lattice_, spec_, resolution);
}

HygieneReport numerics_hygiene(const PotentialField& field, const WaveFunction& psi, double omega,
                               double steps_per_period, double periods) {
    if (!field.is_static()) throw DomainError("numerics_hygiene: potential must be static");
    if (!(omega > 0.0) || !(periods > 0.0)) throw DomainError("numerics_hygiene: omega and periods must be positive");
    PropagationOptions options;
    options.dt = default_time_step(omega, steps_per_period);
    options.track_norm = true;
    const double span = periods * 2.0 * pi / omega;
    const double e0 = energy_expectation(psi, field);
    const Trajectory run = propagate(psi, field, 0.0, span, options);
    const double e1 = energy_expectation(run.final_state, field);

    HygieneReport r;
    r.max_step_norm_drift = run.max_step_norm_drift;
    r.norm_drift = run.norm_drift;
    r.energy_drift = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300);
    r.periods = periods;
    r.steps = run.steps;
    return r;
}

double ConvergenceCheck::tolerance() const noexcept {
    return std::max(0.1 * std::abs(coarse), 1e-5);
}

bool ConvergenceCheck::agrees() const noexcept {
    return std::abs(refined - coarse) < tolerance();
}

double dominant_period(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 8) throw DomainError("dominant_period: need at least 8 samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += series[i];
        sxx += x * x;
        sxy += x * series[i];
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double offset = (sy - slope * sx) / nn;

    std::vector<double> power(n / 2 + 1, 0.0);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double r = series[i] - (offset + slope * static_cast<double>(i));
            acc += r * std::polar(1.0, -2.0 * pi * static_cast<double>(k * i) / nn);
        }
        power[k] = std::norm(acc);
    }
    std::size_t peak = 1;
    for (std::size_t k = 2; k <= n / 2; ++k)
        if (power[k] > power[peak]) peak = k;
    if (!(power[peak] > 0.0)) throw NumericError("dominant_period: series has no oscillation");
    double shift = 0.0;
    if (peak > 1 && peak < n / 2) {
        const double a = power[peak - 1], b = power[peak], c = power[peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) shift = 0.5 * (a - c) / denom;
    }
    return nn / (static_cast<double>(peak) + shift);
}

}  // namespace tweezer
