#include "tweezer/dynamics.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tweezer/errors.hpp"

namespace tweezer {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kinetic_prefactor = 1.0 / (pi * pi);  // hbar^2 / 2m in E_r a_lat^2

// In-place complex FFT plans, cached per size. Planning is not thread-safe in
// FFTW, execution on distinct arrays is.
struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

const FftPlans& plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, FftPlans> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<complex> scratch(n);
    auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
    const int size = static_cast<int>(n);
    FftPlans p;
    p.forward = fftw_plan_dft_1d(size, data, data, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_1d(size, data, data, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

void fft_forward(std::span<complex> data) {
    fftw_execute_dft(plans_for(data.size()).forward, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

void fft_backward(std::span<complex> data) {
    fftw_execute_dft(plans_for(data.size()).backward, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

void require_same_grid(const WaveFunction& a, const WaveFunction& b, const char* what) {
    if (!a.same_grid(b)) throw ShapeError(std::string(what) + ": wavefunctions live on different grids");
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max) {
    if (n_points < 64 || !std::has_single_bit(n_points))
        throw DomainError("Grid: n_points must be a power of two >= 64");
    if (!(x_max > x_min)) throw DomainError("Grid: x_max must exceed x_min");
    dx_ = (x_max - x_min) / static_cast<double>(n_points);
    dk_ = 2.0 * pi / (x_max - x_min);
    xs_.resize(n_points);
    ks_.resize(n_points);
    const auto n = static_cast<std::ptrdiff_t>(n_points);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        xs_[static_cast<std::size_t>(i)] = x_min + static_cast<double>(i) * dx_;
        const std::ptrdiff_t j = i < n / 2 ? i : i - n;
        ks_[static_cast<std::size_t>(i)] = static_cast<double>(j) * dk_;
    }
}

std::shared_ptr<const Grid> Grid::around(double from, double to, std::size_t sites,
                                         std::size_t points_per_site) {
    const double span = std::abs(to - from);
    if (static_cast<double>(sites) - span < 6.0)
        throw DomainError("Grid::around: window must extend six sites beyond the trajectory");
    const double mid = 0.5 * (from + to);
    const double half = 0.5 * static_cast<double>(sites);
    return std::make_shared<const Grid>(mid - half, mid + half, sites * points_per_site);
}

std::size_t Grid::index_of(double x) const noexcept {
    const double r = std::round((x - x_min_) / dx_);
    if (r <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(r), xs_.size() - 1);
}

// ---------------------------------------------------------------- WaveFunction

WaveFunction::WaveFunction(GridPtr grid) : grid_(std::move(grid)), psi_(grid_->size()) {}

WaveFunction::WaveFunction(GridPtr grid, std::vector<complex> amplitudes)
    : grid_(std::move(grid)), psi_(std::move(amplitudes)) {
    if (psi_.size() != grid_->size()) throw ShapeError("WaveFunction: amplitude count != grid size");
}

double WaveFunction::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : psi_) s += std::norm(a);
    return s * grid_->dx();
}

void WaveFunction::normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericError("WaveFunction: cannot normalize");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : psi_) a *= scale;
}

complex WaveFunction::inner(const WaveFunction& other) const {
    require_same_grid(*this, other, "inner");
    complex s{0.0, 0.0};
    for (std::size_t i = 0; i < psi_.size(); ++i) s += std::conj(psi_[i]) * other.psi_[i];
    return s * grid_->dx();
}

std::vector<double> WaveFunction::density() const {
    std::vector<double> d(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) d[i] = std::norm(psi_[i]);
    return d;
}

double WaveFunction::weight_in(double a, double b) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        const double x = grid_->x(i);
        if (x >= a && x < b) s += std::norm(psi_[i]);
    }
    return s * grid_->dx();
}

void WaveFunction::roll(std::ptrdiff_t points) {
    const auto n = static_cast<std::ptrdiff_t>(psi_.size());
    std::ptrdiff_t shift = points % n;
    if (shift < 0) shift += n;
    std::rotate(psi_.begin(), psi_.begin() + (n - shift), psi_.end());
}

bool WaveFunction::same_grid(const WaveFunction& other) const noexcept {
    return grid_ == other.grid_ || *grid_ == *other.grid_;
}

std::size_t EigenSet::most_localized_in(double a, double b) const {
    std::size_t best = 0;
    double best_weight = -1.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double w = states[i].weight_in(a, b);
        if (w > best_weight) {
            best_weight = w;
            best = i;
        }
    }
    return best;
}

// ---------------------------------------------------------------- eigensolver

EigenSet stationary_states(std::span<const double> potential, const GridPtr& grid, std::size_t n) {
    const std::size_t size = grid->size();
    if (potential.size() != size) throw ShapeError("stationary_states: potential size != grid size");
    if (n == 0 || n >= size / 4) throw DomainError("stationary_states: n must satisfy 0 < n << n_points");

    const double off = -kinetic_prefactor / (grid->dx() * grid->dx());
    std::vector<double> diag(size), sub(size - 1, off);
    for (std::size_t i = 0; i < size; ++i) diag[i] = -2.0 * off + potential[i];

    std::vector<double> d = diag, e = sub;
    e.push_back(0.0);
    std::vector<double> w(size);
    std::vector<double> z(size * n);
    std::vector<lapack_int> isuppz(2 * n);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(size), d.data(), e.data(), 0.0, 0.0, 1,
        static_cast<lapack_int>(n), 0.0, &found, w.data(), z.data(), static_cast<lapack_int>(size),
        isuppz.data());
    if (info != 0 || found != static_cast<lapack_int>(n)) {
        std::ostringstream msg;
        msg << "stationary_states: dstevr failed (info=" << info << ", found=" << found << ")";
        throw NumericError(msg.str());
    }

    const double scale = std::max(1.0, std::abs(w[n - 1]) + 4.0 * std::abs(off));
    EigenSet set;
    for (std::size_t k = 0; k < n; ++k) {
        const double* v = z.data() + k * size;
        double residual = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            double hv = diag[i] * v[i];
            if (i > 0) hv += off * v[i - 1];
            if (i + 1 < size) hv += off * v[i + 1];
            residual = std::max(residual, std::abs(hv - w[k] * v[i]));
        }
        if (residual > 1e-9 * scale) {
            std::ostringstream msg;
            msg << "stationary_states: residual " << residual << " for state " << k;
            throw NumericError(msg.str());
        }
        std::size_t peak = 0;
        for (std::size_t i = 1; i < size; ++i)
            if (std::abs(v[i]) > std::abs(v[peak])) peak = i;
        const double sign = v[peak] < 0.0 ? -1.0 : 1.0;
        std::vector<complex> amps(size);
        for (std::size_t i = 0; i < size; ++i) amps[i] = sign * v[i];
        WaveFunction psi(grid, std::move(amps));
        psi.normalize();
        set.energies.push_back(w[k]);
        set.states.push_back(std::move(psi));
    }
    return set;
}

EigenSet stationary_states(const PotentialField& field, const GridPtr& grid, std::size_t n) {
    if (!field.is_static()) throw DomainError("stationary_states: field must be static");
    std::vector<double> v(grid->size());
    field.sample(grid->xs(), 0.0, v);
    return stationary_states(v, grid, n);
}

WaveFunction site_ground_state(const LatticeSpec& lattice, const GridPtr& grid, double site_center) {
    std::vector<double> v(grid->size());
    const double half = 0.5 * lattice.spacing;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = grid->x(i);
        v[i] = std::abs(x - site_center) <= half ? lattice(x) : lattice.depth;
    }
    return stationary_states(v, grid, 1).states.front();
}

// ---------------------------------------------------------------- Bloch bands

namespace {

double lowest_band_energy(const LatticeSpec& lattice, double q, std::size_t basis) {
    const auto half = static_cast<std::ptrdiff_t>(basis / 2);
    const double g = 2.0 * pi / lattice.spacing;
    std::vector<double> d(basis), e(basis, -lattice.depth / 4.0);
    for (std::ptrdiff_t m = -half; m <= half; ++m) {
        const double k = q / lattice.spacing + g * static_cast<double>(m);
        d[static_cast<std::size_t>(m + half)] = kinetic_prefactor * k * k + lattice.depth / 2.0;
    }
    std::vector<double> w(basis);
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2);
    double dummy = 0.0;
    const lapack_int info =
        LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', static_cast<lapack_int>(basis), d.data(), e.data(),
                       0.0, 0.0, 1, 1, 0.0, &found, w.data(), &dummy, 1, isuppz.data());
    if (info != 0 || found != 1) throw NumericError("bloch_bands: eigenvalue solver failed");
    return w[0];
}

}  // namespace

BlochBand bloch_bands(const LatticeSpec& lattice, std::size_t n_q, std::size_t basis) {
    lattice.validate();
    if (basis < 21 || basis % 2 == 0) throw DomainError("bloch_bands: basis must be odd and >= 21");
    if (n_q < 2) throw DomainError("bloch_bands: need at least two quasimomenta");

    BlochBand band;
    band.free_particle = lattice.depth == 0.0;
    double e_min = lowest_band_energy(lattice, 0.0, basis);
    double e_max = lowest_band_energy(lattice, pi, basis);
    for (std::size_t j = 0; j < n_q; ++j) {
        const double q = -pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(n_q - 1);
        const double e = lowest_band_energy(lattice, q, basis);
        band.quasimomenta.push_back(q);
        band.energies.push_back(e);
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
    }
    if (band.free_particle) {
        band.tunnel_coupling = std::numeric_limits<double>::quiet_NaN();
        return band;
    }
    band.tunnel_coupling = 0.25 * (e_max - e_min);

    const std::size_t big = 2 * basis + 1;
    const double j_big =
        0.25 * (lowest_band_energy(lattice, pi, big) - lowest_band_energy(lattice, 0.0, big));
    if (std::abs(j_big - band.tunnel_coupling) > 1e-6 * std::abs(j_big) + 1e-14) {
        std::ostringstream msg;
        msg << "bloch_bands: tunnel coupling not converged with basis " << basis << " (" << band.tunnel_coupling
            << " vs " << j_big << ")";
        throw NumericError(msg.str());
    }
    return band;
}

// ---------------------------------------------------------------- observables

double energy_expectation(const WaveFunction& psi, const PotentialField& field, double t) {
    const Grid& g = psi.grid();
    std::vector<complex> k(psi.amplitudes().begin(), psi.amplitudes().end());
    fft_forward(k);
    const auto ks = g.wavenumbers();
    double kinetic = 0.0, total_k = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        kinetic += std::norm(k[i]) * kinetic_prefactor * ks[i] * ks[i];
        total_k += std::norm(k[i]);
    }
    kinetic /= total_k;
    std::vector<double> v(g.size());
    field.sample(g.xs(), t, v);
    double potential = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) potential += std::norm(psi[i]) * v[i];
    potential *= g.dx() / psi.norm_squared();
    return kinetic + potential;
}

double excitation_probability(const WaveFunction& psi, const EigenSet& reference) {
    if (reference.size() == 0) throw ShapeError("excitation_probability: empty reference");
    require_same_grid(psi, reference.ground(), "excitation_probability");
    return 1.0 - std::norm(reference.ground().inner(psi));
}

double overlap_fidelity(const WaveFunction& psi, const WaveFunction& target) {
    require_same_grid(psi, target, "overlap_fidelity");
    return std::norm(target.inner(psi));
}

double default_time_step(double omega, double steps_per_period) {
    if (!(omega > 0.0) || !(steps_per_period > 0.0)) throw DomainError("default_time_step: invalid input");
    return 2.0 * pi / omega / steps_per_period;
}

// ---------------------------------------------------------------- propagation

std::vector<Trajectory> propagate_many(std::span<const WaveFunction> initial,
                                       const PotentialField& field, double t_begin, double t_end,
                                       const PropagationOptions& options) {
    if (initial.empty()) return {};
    for (const auto& psi : initial) require_same_grid(psi, initial.front(), "propagate");
    if (!(options.dt > 0.0)) throw DomainError("propagate: dt must be positive");
    if (!(t_end >= t_begin)) throw DomainError("propagate: t_end before t_begin");

    const GridPtr& grid = initial.front().grid_ptr();
    const std::size_t n = grid->size();
    const double span = t_end - t_begin;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / options.dt - 1e-9)));
    const double dt = span / static_cast<double>(steps);
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<complex> kin_full(n), kin_half(n);
    const auto ks = grid->wavenumbers();
    for (std::size_t i = 0; i < n; ++i) {
        const double e = kinetic_prefactor * ks[i] * ks[i];
        kin_full[i] = std::polar(inv_n, -e * dt);
        kin_half[i] = std::polar(inv_n, -e * 0.5 * dt);
    }

    // Frame step indices (0 and `steps` included).
    std::vector<std::size_t> frame_steps;
    if (options.frames >= 2) {
        for (std::size_t f = 0; f < options.frames; ++f) {
            const auto s = static_cast<std::size_t>(
                std::llround(static_cast<double>(f) * static_cast<double>(steps) /
                             static_cast<double>(options.frames - 1)));
            if (frame_steps.empty() || s != frame_steps.back()) frame_steps.push_back(s);
        }
    }

    Trajectory blank;
    blank.final_state = initial.front();
    blank.steps = steps;
    std::vector<Trajectory> out(initial.size(), blank);
    std::vector<std::vector<complex>> work;
    work.reserve(initial.size());
    for (const auto& psi : initial) work.emplace_back(psi.amplitudes().begin(), psi.amplitudes().end());

    auto check_edges = [&](std::size_t which, double t) {
        const auto& w = work[which];
        const std::size_t m = std::min(options.edge_points, n / 2);
        double edge = 0.0;
        for (std::size_t i = 0; i < m; ++i) edge = std::max({edge, std::norm(w[i]), std::norm(w[n - 1 - i])});
        if (!std::isfinite(edge)) throw NumericError("propagate: non-finite amplitude");
        if (edge > options.edge_threshold) {
            std::ostringstream msg;
            msg << "propagate: edge density " << edge << " exceeds " << options.edge_threshold << " at t=" << t;
            throw DomainOverflowError(msg.str());
        }
    };
    auto record = [&](double t) {
        for (std::size_t b = 0; b < work.size(); ++b) {
            out[b].times.push_back(t);
            out[b].states.emplace_back(grid, work[b]);
        }
    };

    std::vector<double> last_norm(work.size(), 0.0);
    auto norm_of = [&](const std::vector<complex>& w) {
        double total = 0.0;
        for (const auto& a : w) total += std::norm(a);
        return total * grid->dx();
    };
    if (options.track_norm)
        for (std::size_t b = 0; b < work.size(); ++b) last_norm[b] = norm_of(work[b]);
    const std::vector<double> first_norm = last_norm;

    std::size_t next_frame = 0;
    if (!frame_steps.empty() && frame_steps[0] == 0) {
        record(t_begin);
        ++next_frame;
    }

    std::vector<double> v(n);
    std::vector<complex> phase(n);
    std::size_t step = 0;
    while (step < steps) {
        const std::size_t segment_end = next_frame < frame_steps.size() ? frame_steps[next_frame] : steps;
        for (auto& w : work) {
            fft_forward(w);
            for (std::size_t i = 0; i < n; ++i) w[i] *= kin_half[i];
        }
        for (; step < segment_end; ++step) {
            const double t_mid = t_begin + (static_cast<double>(step) + 0.5) * dt;
            field.sample(grid->xs(), t_mid, v);
            for (std::size_t i = 0; i < n; ++i) phase[i] = std::polar(1.0, -v[i] * dt);
            const bool last = step + 1 == segment_end;
            const auto& kin = last ? kin_half : kin_full;
            for (std::size_t b = 0; b < work.size(); ++b) {
                auto& w = work[b];
                fft_backward(w);
                for (std::size_t i = 0; i < n; ++i) w[i] *= phase[i];
                check_edges(b, t_mid);
                if (options.track_norm) {
                    // the potential kick is exactly unitary, so this samples the norm after one full step
                    const double now = norm_of(w);
                    out[b].max_step_norm_drift = std::max(out[b].max_step_norm_drift, std::abs(now - last_norm[b]));
                    last_norm[b] = now;
                }
                fft_forward(w);
                for (std::size_t i = 0; i < n; ++i) w[i] *= kin[i];
            }
        }
        for (auto& w : work) fft_backward(w);
        if (next_frame < frame_steps.size() && frame_steps[next_frame] == step) {
            record(t_begin + static_cast<double>(step) * dt);
            ++next_frame;
        }
    }

    for (std::size_t b = 0; b < work.size(); ++b) {
        check_edges(b, t_end);
        if (options.track_norm) {
            const double now = norm_of(work[b]);
            out[b].max_step_norm_drift = std::max(out[b].max_step_norm_drift, std::abs(now - last_norm[b]));
            out[b].norm_drift = std::abs(now - first_norm[b]);
        }
        out[b].final_state = WaveFunction(grid, std::move(work[b]));
    }
    return out;
}

Trajectory propagate(const WaveFunction& initial, const PotentialField& field, double t_begin,
                     double t_end, const PropagationOptions& options) {
    auto result = propagate_many(std::span<const WaveFunction>(&initial, 1), field, t_begin, t_end, options);
    return std::move(result.front());
}

}  // namespace tweezer
