#include "tweezer/potentials.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>

#include "tweezer/errors.hpp"

namespace tweezer {

namespace {

constexpr double pi = std::numbers::pi;

double polarization_sign(Polarization p) {
    switch (p) {
        case Polarization::Linear: return 0.0;
        case Polarization::SigmaPlus: return 1.0;
        case Polarization::SigmaMinus: return -1.0;
    }
    return 0.0;
}

// Ground hyperfine level energy relative to the fine-structure centroid, in
// units of the splitting, for J=1/2: F = I + 1/2 sits at I/(2I+1).
double hyperfine_offset_fraction(int f, double nuclear_spin) {
    const double upper = nuclear_spin / (2.0 * nuclear_spin + 1.0);
    return f == static_cast<int>(nuclear_spin + 0.5) ? upper : upper - 1.0;
}

}  // namespace

void LatticeSpec::validate() const {
    if (!(depth >= 0.0)) throw DomainError("lattice depth must be non-negative");
    if (!(spacing > 0.0)) throw DomainError("lattice spacing must be positive");
}

double LatticeSpec::operator()(double x) const noexcept {
    const double s = std::sin(pi * (x - origin) / spacing);
    return depth * s * s;
}

void TweezerSpec::validate() const {
    if (!(depth >= 0.0)) throw DomainError("tweezer depth must be non-negative");
    if (!(waist > 0.0)) throw DomainError("tweezer waist must be positive");
}

double TweezerSpec::operator()(double x) const noexcept {
    const double d = x - center;
    return -depth * std::exp(-2.0 * d * d / (waist * waist));
}

PotentialField& PotentialField::add_lattice(const LatticeSpec& spec) {
    spec.validate();
    lattices_.push_back(spec);
    return *this;
}

PotentialField& PotentialField::add_tweezer(const TweezerSpec& spec, TweezerDrive drive) {
    spec.validate();
    tweezers_.push_back({spec, std::move(drive)});
    return *this;
}

bool PotentialField::is_static() const noexcept {
    for (const auto& term : tweezers_)
        if (term.drive.depth || term.drive.center) return false;
    return true;
}

TweezerSpec PotentialField::tweezer_at(std::size_t index, double t) const {
    const auto& term = tweezers_.at(index);
    TweezerSpec spec = term.spec;
    if (term.drive.depth) spec.depth = term.drive.depth(t);
    if (term.drive.center) spec.center = term.drive.center(t);
    return spec;
}

double PotentialField::operator()(double x, double t) const {
    double v = 0.0;
    for (const auto& lat : lattices_) v += lat(x);
    for (std::size_t i = 0; i < tweezers_.size(); ++i) v += tweezer_at(i, t)(x);
    return v;
}

void PotentialField::sample(std::span<const double> xs, double t, std::span<double> out) const {
    if (xs.size() != out.size()) throw ShapeError("PotentialField::sample: size mismatch");
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = 0.0;
    for (const auto& lat : lattices_)
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] += lat(xs[i]);
    for (std::size_t k = 0; k < tweezers_.size(); ++k) {
        const TweezerSpec spec = tweezer_at(k, t);
        if (spec.depth == 0.0) continue;
        const double inv_w2 = 2.0 / (spec.waist * spec.waist);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - spec.center;
            out[i] -= spec.depth * std::exp(-inv_w2 * d * d);
        }
    }
}

PotentialField PotentialField::at_time(double t) const {
    PotentialField frozen;
    frozen.lattices_ = lattices_;
    for (std::size_t i = 0; i < tweezers_.size(); ++i)
        frozen.tweezers_.push_back({tweezer_at(i, t), {}});
    return frozen;
}

TrapFrequency harmonic_from_curvature(double curvature) {
    if (!(curvature > 0.0)) throw GeometryError("trap_frequency: curvature is not positive");
    TrapFrequency tf;
    tf.curvature = curvature;
    tf.omega = std::sqrt(curvature / UnitSystem::mass_internal);
    tf.sigma = std::sqrt(1.0 / (UnitSystem::mass_internal * tf.omega));
    return tf;
}

TrapFrequency trap_frequency(const PotentialField& field, double site_center, double stencil,
                             double t) {
    if (!(stencil > 0.0)) throw DomainError("trap_frequency: stencil must be positive");
    const double h = stencil;
    const double x = site_center;
    const double curvature = (-field(x + 2 * h, t) + 16.0 * field(x + h, t) - 30.0 * field(x, t) +
                              16.0 * field(x - h, t) - field(x - 2 * h, t)) /
                             (12.0 * h * h);
    return harmonic_from_curvature(curvature);
}

std::vector<LineShift> light_shift_lines(double laser_wavelength, Polarization polarization,
                                         const HyperfineState& state, const OpticalLine& line_half,
                                         const OpticalLine& line_three_half,
                                         double hyperfine_splitting, bool counter_rotating) {
    if (!(laser_wavelength > 0.0)) throw DomainError("light shift: wavelength must be positive");
    const double p_gm = polarization_sign(polarization) * state.g_f() * state.m_f;
    const double omega = 2.0 * pi * codata::c / laser_wavelength;
    const double ground_offset =
        2.0 * pi * hyperfine_splitting * hyperfine_offset_fraction(state.f, 1.5);

    std::vector<LineShift> out;
    auto add = [&](const OpticalLine& line, double weight) {
        LineShift ls;
        ls.line_frequency = line.angular_frequency() - ground_offset;
        ls.linewidth = line.linewidth;
        ls.detuning = omega - ls.line_frequency;
        if (std::abs(ls.detuning) <= line.linewidth)
            throw ResonanceError("light shift: laser within a linewidth of " +
                                 std::string(line.name));
        const double w0 = ls.line_frequency;
        double inverse = 1.0 / ls.detuning;
        if (counter_rotating) inverse -= 1.0 / (omega + w0);
        ls.shift_per_intensity =
            3.0 * pi * codata::c * codata::c / (2.0 * w0 * w0 * w0) * weight * line.linewidth * inverse;
        out.push_back(ls);
    };
    add(line_three_half, (2.0 + p_gm) / 3.0);
    add(line_half, (1.0 - p_gm) / 3.0);
    return out;
}

double light_shift(const TweezerSpec& spec, const HyperfineState& state, double intensity,
                   const SpeciesData& species) {
    double total = 0.0;
    for (const auto& l : light_shift_lines(spec.wavelength, spec.polarization, state,
                                           species.line_half, species.line_three_half,
                                           species.hyperfine_splitting))
        total += l.shift_per_intensity;
    return total * intensity;
}

double null_wavelength(const HyperfineState& state, Polarization polarization,
                       const SpeciesData& species) {
    if (polarization == Polarization::Linear)
        throw NoNullError("null_wavelength: requires circular polarization");

    const double w_low = species.line_half.angular_frequency();
    const double w_high = species.line_three_half.angular_frequency();
    // stay clear of both lines including the ground hyperfine offset of either F
    const double margin = 2.0 * pi * species.hyperfine_splitting +
                          1e3 * std::max(species.line_half.linewidth, species.line_three_half.linewidth);

    auto shift_at = [&](double w) {
        TweezerSpec spec;
        spec.wavelength = 2.0 * pi * codata::c / w;
        spec.polarization = polarization;
        return light_shift(spec, state, 1.0, species);
    };

    const double a = w_low + margin;
    const double b = w_high - margin;
    const double fa = shift_at(a);
    const double fb = shift_at(b);
    if (!(fa * fb < 0.0))
        throw NoNullError("null_wavelength: light shift has no zero between the lines");

    boost::uintmax_t max_iter = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [lo, hi] = boost::math::tools::toms748_solve(shift_at, a, b, fa, fb, tol, max_iter);
    const double w = 0.5 * (lo + hi);
    return 2.0 * pi * codata::c / w;
}

}  // namespace tweezer
