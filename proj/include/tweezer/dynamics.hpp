#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tweezer/potentials.hpp"

namespace tweezer {

using complex = std::complex<double>;

// Uniform periodic grid x_i = x_min + i dx, i < n_points, in lattice units.
class Grid {
public:
    Grid(double x_min, double x_max, std::size_t n_points);

    // Window of `sites` lattice spacings centred on the midpoint of [from, to],
    // sampled with `points_per_site` points per spacing. The window must leave
    // at least six spacings beyond the trajectory.
    static std::shared_ptr<const Grid> around(double from, double to, std::size_t sites = 8,
                                              std::size_t points_per_site = 256);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return xs_.size(); }
    double dx() const noexcept { return dx_; }
    double dk() const noexcept { return dk_; }
    double x(std::size_t i) const noexcept { return xs_[i]; }
    std::span<const double> xs() const noexcept { return xs_; }
    // Angular wavenumbers in FFT storage order.
    std::span<const double> wavenumbers() const noexcept { return ks_; }

    // Nearest grid index to x (clamped).
    std::size_t index_of(double x) const noexcept;

    bool operator==(const Grid& other) const noexcept {
        return x_min_ == other.x_min_ && x_max_ == other.x_max_ && xs_.size() == other.xs_.size();
    }

private:
    double x_min_;
    double x_max_;
    double dx_;
    double dk_;
    std::vector<double> xs_;
    std::vector<double> ks_;
};

using GridPtr = std::shared_ptr<const Grid>;

class WaveFunction {
public:
    WaveFunction() = default;  // empty placeholder without a grid
    explicit WaveFunction(GridPtr grid);
    WaveFunction(GridPtr grid, std::vector<complex> amplitudes);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::span<complex> amplitudes() noexcept { return psi_; }
    std::span<const complex> amplitudes() const noexcept { return psi_; }
    std::size_t size() const noexcept { return psi_.size(); }
    complex& operator[](std::size_t i) noexcept { return psi_[i]; }
    const complex& operator[](std::size_t i) const noexcept { return psi_[i]; }

    // sum |psi_i|^2 dx
    double norm_squared() const noexcept;
    void normalize();
    // <this|other> = sum conj(this_i) other_i dx
    complex inner(const WaveFunction& other) const;
    std::vector<double> density() const;
    // Probability inside [a, b).
    double weight_in(double a, double b) const noexcept;
    // Shift the samples by `points` (periodic), i.e. psi(x) -> psi(x - points dx).
    void roll(std::ptrdiff_t points);

    bool same_grid(const WaveFunction& other) const noexcept;

private:
    GridPtr grid_;
    std::vector<complex> psi_;
};

struct EigenSet {
    std::vector<double> energies;
    std::vector<WaveFunction> states;

    std::size_t size() const noexcept { return energies.size(); }
    const WaveFunction& ground() const { return states.at(0); }
    // Index of the state with the largest probability in [a, b).
    std::size_t most_localized_in(double a, double b) const;
};

// Lowest n eigenpairs of -(1/pi^2) d^2/dx^2 + V on the grid, second-order
// central differences with hard walls. Throws NumericError when the residual
// check fails and DomainError for time-dependent fields.
EigenSet stationary_states(const PotentialField& field, const GridPtr& grid, std::size_t n);
EigenSet stationary_states(std::span<const double> potential, const GridPtr& grid, std::size_t n);

// Ground state of a single lattice site whose neighbours are flattened to the
// barrier height: a localized, Wannier-like starting state.
WaveFunction site_ground_state(const LatticeSpec& lattice, const GridPtr& grid, double site_center);

struct BlochBand {
    std::vector<double> quasimomenta;  // in [-pi, pi] per a_lat
    std::vector<double> energies;      // lowest band, E_r
    double tunnel_coupling = 0.0;      // (E_max - E_min) / 4, E_r
    bool free_particle = false;        // depth zero: J is not meaningful
};

// Lowest Bloch band in a plane-wave basis of `basis` (odd, >= 21) components.
// The tunnel coupling is checked against a doubled basis.
BlochBand bloch_bands(const LatticeSpec& lattice, std::size_t n_q, std::size_t basis = 21);

// <H> with the spectral kinetic energy used by the propagator.
double energy_expectation(const WaveFunction& psi, const PotentialField& field, double t = 0.0);

// 1 - |<ground|psi>|^2
double excitation_probability(const WaveFunction& psi, const EigenSet& reference);
// |<target|psi>|^2
double overlap_fidelity(const WaveFunction& psi, const WaveFunction& target);

struct PropagationOptions {
    double dt = 0.0;            // upper bound; the span is divided evenly
    std::size_t frames = 0;     // recorded samples including both ends (0: none)
    double edge_threshold = 1e-10;
    std::size_t edge_points = 4;
    bool track_norm = false;    // record per-step norm drift (one extra pass per step)
};

struct Trajectory {
    std::vector<double> times;
    std::vector<WaveFunction> states;
    WaveFunction final_state;
    std::size_t steps = 0;
    // Filled when track_norm is set: largest |norm change| between consecutive
    // steps, and |final norm - initial norm|.
    double max_step_norm_drift = 0.0;
    double norm_drift = 0.0;
};

// Strang-split spectral propagation: half kinetic, full potential at the step
// midpoint, half kinetic, with adjacent half kicks fused. Several states in the
// same potential are advanced together. Throws DomainOverflowError when any
// state's edge density exceeds the threshold and NumericError on NaN.
std::vector<Trajectory> propagate_many(std::span<const WaveFunction> initial,
                                       const PotentialField& field, double t_begin, double t_end,
                                       const PropagationOptions& options);

Trajectory propagate(const WaveFunction& initial, const PotentialField& field, double t_begin,
                     double t_end, const PropagationOptions& options);

// Default step: period / steps_per_period for the given angular frequency.
double default_time_step(double omega, double steps_per_period = 100.0);

}  // namespace tweezer
