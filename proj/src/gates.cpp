#include "tweezer/gates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"

namespace tweezer {

namespace {
constexpr double pi = std::numbers::pi;
const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
}  // namespace

void QubitState::validate() const {
    const double n = std::norm(up) + std::norm(down);
    if (std::abs(n - 1.0) > 1e-12) throw DomainError("qubit state is not normalized");
}

double TwoQubitState::norm_squared() const noexcept {
    double n = 0.0;
    for (const auto& a : amplitudes) n += std::norm(a);
    return n;
}

void TwoQubitState::validate() const {
    if (std::abs(norm_squared() - 1.0) > 1e-12) throw DomainError("two-qubit state is not normalized");
}

TwoQubitState TwoQubitState::product(const QubitState& ground, const QubitState& excited) {
    ground.validate();
    excited.validate();
    TwoQubitState s;
    s.amplitudes[UpUp] = ground.up * excited.up;
    s.amplitudes[UpDown] = ground.up * excited.down;
    s.amplitudes[DownUp] = ground.down * excited.up;
    s.amplitudes[DownDown] = ground.down * excited.down;
    return s;
}

SingletTriplet to_singlet_triplet(const TwoQubitState& psi) {
    const auto& a = psi.amplitudes;
    SingletTriplet st;
    st.singlet = inv_sqrt2 * (a[TwoQubitState::UpDown] - a[TwoQubitState::DownUp]);
    st.t0 = inv_sqrt2 * (a[TwoQubitState::UpDown] + a[TwoQubitState::DownUp]);
    st.t_plus = a[TwoQubitState::UpUp];
    st.t_minus = a[TwoQubitState::DownDown];
    return st;
}

TwoQubitState from_singlet_triplet(const SingletTriplet& st) {
    TwoQubitState psi;
    psi.amplitudes[TwoQubitState::UpUp] = st.t_plus;
    psi.amplitudes[TwoQubitState::UpDown] = inv_sqrt2 * (st.t0 + st.singlet);
    psi.amplitudes[TwoQubitState::DownUp] = inv_sqrt2 * (st.t0 - st.singlet);
    psi.amplitudes[TwoQubitState::DownDown] = st.t_minus;
    return psi;
}

void InteractionParams::validate() const {
    if (!(u_gg >= 0.0) || !(u_up_down >= 0.0) || !(u_up_up >= 0.0) || !(u_down_down >= 0.0))
        throw DomainError("interaction energies must be non-negative");
}

double interaction_energy(const WaveFunction& psi_a, const WaveFunction& psi_b, double scattering_length,
                          const TransverseFrequencies& transverse) {
    if (!psi_a.same_grid(psi_b)) throw ShapeError("interaction_energy: wave functions on different grids");
    if (!(transverse.y > 0.0) || !(transverse.z > 0.0))
        throw DomainError("interaction_energy: transverse frequencies must be positive");
    double overlap = 0.0;
    for (std::size_t i = 0; i < psi_a.size(); ++i) overlap += std::norm(psi_a[i]) * std::norm(psi_b[i]);
    overlap *= psi_a.grid().dx();
    // g / (pi sigma_y sigma_z) with g = 4 pi a_s / m and sigma^2 = 1 / (m w), hbar = 1
    return 2.0 * scattering_length * std::sqrt(transverse.y * transverse.z) * overlap;
}

TransverseFrequencies transverse_frequencies(const LatticeSpec& lattice, const PotentialField& field, double x,
                                             double t) {
    const double m = UnitSystem::mass_internal;
    const double lattice_curvature = 2.0 * pi * pi * lattice.depth / (lattice.spacing * lattice.spacing);
    double in_plane = lattice_curvature;
    for (std::size_t i = 0; i < field.tweezer_count(); ++i) {
        const TweezerSpec tw = field.tweezer_at(i, t);
        const double w2 = tw.waist * tw.waist;
        const double d = x - tw.center;
        in_plane += 4.0 * tw.depth / w2 * std::exp(-2.0 * d * d / w2);
    }
    if (!(lattice_curvature > 0.0)) throw DomainError("transverse confinement needs a lattice");
    return {std::sqrt(in_plane / m), std::sqrt(lattice_curvature / m)};
}

InteractionParams interaction_params(const WaveFunction& ground, const TransverseFrequencies& transverse,
                                     const SpeciesData& species, const UnitSystem& units) {
    auto energy = [&](double a_meters) {
        return interaction_energy(ground, ground, units.from_si_length(a_meters), transverse);
    };
    InteractionParams p;
    p.u_gg = energy(species.scattering_length_background);
    p.u_up_down = energy(species.scattering_length_up_down);
    p.u_up_up = energy(species.scattering_length_up_up);
    p.u_down_down = energy(species.scattering_length_down_down);
    p.magnetic_field = species.feshbach_field;
    return p;
}

double merge_gate_phase_time(double u_same, double u_cross) {
    const double delta = std::abs(u_cross - u_same);
    if (!(delta > 1e-12 * std::max(std::abs(u_same), std::abs(u_cross))))
        throw NoGateError("merge gate: identical interaction energies give no differential phase");
    return pi / delta;
}

double phase_gate_time(double interaction, double target_phase) {
    if (!(interaction > 0.0)) throw DomainError("phase gate: interaction energy must be positive");
    if (!(target_phase >= 0.0)) throw DomainError("phase gate: target phase must be non-negative");
    return target_phase / interaction;
}

SwapTimes swap_times(double u_gg) {
    if (!(u_gg > 0.0)) throw DomainError("swap_times: U_gg must be positive");
    SwapTimes s;
    s.u_eg = excited_ground_ratio * u_gg;
    s.swap = pi / s.u_eg;
    s.entangling = 0.5 * s.swap;
    return s;
}

TwoQubitState spin_exchange_evolve(const TwoQubitState& psi, double u_eg, double t) {
    psi.validate();
    SingletTriplet st = to_singlet_triplet(psi);
    const complex phase = std::polar(1.0, u_eg * t);
    st.t0 *= phase;
    st.t_plus *= phase;
    st.t_minus *= phase;
    return from_singlet_triplet(st);
}

double bandmap_interaction_phase(const Trajectory& a, const Trajectory& b, double scattering_length,
                                 const TransverseSchedule& transverse) {
    if (a.times.size() != b.times.size() || a.states.size() != a.times.size() ||
        b.states.size() != b.times.size())
        throw ShapeError("interaction phase: trajectories are sampled differently");
    for (std::size_t i = 0; i < a.times.size(); ++i)
        if (a.times[i] != b.times[i]) throw ShapeError("interaction phase: frame times differ");
    if (a.times.size() < 2) throw ShapeError("interaction phase: need at least two frames");
    double phase = 0.0;
    double previous = interaction_energy(a.states[0], b.states[0], scattering_length, transverse(a.times[0]));
    for (std::size_t i = 1; i < a.times.size(); ++i) {
        const double u = interaction_energy(a.states[i], b.states[i], scattering_length, transverse(a.times[i]));
        phase += 0.5 * (u + previous) * (a.times[i] - a.times[i - 1]);
        previous = u;
    }
    return phase;
}

GateKind parse_gate_kind(std::string_view id) {
    if (id == "transport-phase") return GateKind::TransportPhase;
    if (id == "exchange") return GateKind::Exchange;
    throw InputError("unknown gate id: " + std::string(id));
}

std::string_view to_string(GateKind kind) {
    return kind == GateKind::TransportPhase ? "transport-phase" : "exchange";
}

double GateBudget::total_us() const noexcept {
    double total = 0.0;
    for (const auto& s : steps) total += static_cast<double>(s.count) * s.unit_us;
    return total;
}

std::string GateBudget::table() const {
    std::ostringstream out;
    auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
        out << std::left << std::setw(14) << a << std::setw(10) << b << c << '\n';
    };
    row("step", "amount", "time");
    for (const auto& s : steps) row(s.name, std::to_string(s.count), format_double(s.unit_us) + " us");
    row("overall", "-", format_double(total_us()) + " us");
    return out.str();
}

GateBudget gate_budget(GateKind gate, std::size_t sites, const StepDurations& d) {
    GateBudget b;
    b.gate = gate;
    b.sites = sites;
    if (gate == GateKind::TransportPhase) {
        b.steps = {{"ramp-up/down", 6, d.ramp}, {"transport", 2 * (sites + 1), d.transport},
                   {"phase gate", 1, d.phase_hold}};
    } else {
        b.steps = {{"ramp-up/down", 2, d.ramp}, {"transport", 2 * sites, d.transport},
                   {"phase gate", 1, d.swap_hold}, {"merge/split", 2, d.merge}};
    }
    return b;
}

double gate_budget_closed_form(GateKind gate, std::size_t sites) {
    const double n = static_cast<double>(sites);
    return gate == GateKind::TransportPhase ? 199.0 + 50.0 * n : 297.0 + 50.0 * n;
}

std::vector<SequenceStep> spin_dependent_gate_sequence(std::size_t sites, const StepDurations& d) {
    const double n = static_cast<double>(sites);
    std::vector<SequenceStep> forward;
    forward.push_back({"ramp up transport tweezer on atom B", d.ramp, "none",
                       "tweezer B linear (both spins)", false, 1, 0});
    if (sites > 0)
        forward.push_back({"transport atom B next to atom A", n * d.transport, "B up and down",
                           "tweezer B linear (both spins)", false, 0, sites});
    forward.push_back({"switch tweezer B to sigma-, ramp up sigma- tweezer on atom A", d.ramp, "none",
                       "tweezers A and B sigma- (up only)", false, 1, 0});
    forward.push_back({"move up components one site", d.transport, "A up and B up",
                       "tweezers A and B sigma- (up only)", false, 0, 1});
    forward.push_back({"switch tweezer B to linear", d.ramp, "none",
                       "tweezer B linear (both spins), tweezer A sigma- (up only)", false, 1, 0});

    std::vector<SequenceStep> seq = forward;
    seq.push_back({"hold for collisional phase (first half)", 0.5 * d.phase_hold, "none",
                   "tweezer B linear (both spins), tweezer A sigma- (up only)", true, 0, 0});
    seq.push_back({"hold for collisional phase (second half)", 0.5 * d.phase_hold, "none",
                   "tweezer B linear (both spins), tweezer A sigma- (up only)", false, 0, 0});
    for (auto it = forward.rbegin(); it != forward.rend(); ++it) {
        SequenceStep s = *it;
        s.action = "reverse: " + s.action;
        seq.push_back(std::move(s));
    }
    seq.back().echo_pulse = true;
    return seq;
}

}  // namespace tweezer
