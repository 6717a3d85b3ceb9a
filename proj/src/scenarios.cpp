#include "tweezer/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "tweezer/budget_errors.hpp"
#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"
#include "tweezer/gates.hpp"
#include "tweezer/harmonic.hpp"
#include "tweezer/search.hpp"

#ifndef TWEEZER_VERSION
#define TWEEZER_VERSION "0.0.0"
#endif

namespace tweezer {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

using Row = std::vector<double>;

// Writes artifacts with a common comment header.
class Artifacts {
public:
    Artifacts(const ScenarioConfig& config, ScenarioOutcome& outcome)
        : dir_(config.output), outcome_(outcome) {
        fs::create_directories(dir_);
        header_ = "# tweezer " + std::string(version()) + "\n# scenario " +
                  std::string(to_string(config.scenario)) + "\n# parameters " + parameter_hash(config) + "\n";
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void csv(const std::string& name, const std::vector<std::string>& columns, const std::vector<Row>& rows) {
        std::ostringstream out;
        out << header_;
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
            out << '\n';
        }
        write(name, out.str());
    }

    void text(const std::string& name, const std::string& body) { write(name, header_ + body); }

    // Files that carry their own format (coefficient files, config echo).
    void raw(const std::string& name, const std::string& body) { write(name, body); }

    void note(const std::string& name) { outcome_.files.push_back(path(name)); }

private:
    void write(const std::string& name, const std::string& body) {
        std::ofstream out(path(name), std::ios::binary);
        if (!out) throw InputError("cannot write " + path(name));
        out << body;
        outcome_.files.push_back(path(name));
    }

    fs::path dir_;
    ScenarioOutcome& outcome_;
    std::string header_;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw DomainError("scan needs at least one point");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

// out[i] = f(i) on up to `threads` workers; the first error is rethrown.
template <class F>
std::vector<double> parallel_map(std::size_t n, std::size_t threads, F f) {
    std::vector<double> out(n, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

void add_check(ScenarioOutcome& outcome, std::string name, double value, double limit, bool passed) {
    outcome.checks.push_back({std::move(name), value, limit, passed});
}

void add_convergence(ScenarioOutcome& outcome, const std::string& name, double coarse, double refined) {
    const ConvergenceCheck c{coarse, refined};
    add_check(outcome, name + " doubled-resolution change", std::abs(refined - coarse), c.tolerance(), c.agrees());
}

// Propagator health on the ground state of a tweezer of `depth` over a lattice site.
void add_hygiene(ScenarioOutcome& outcome, const ScenarioConfig& config, double depth) {
    const GridPtr grid = Grid::around(0.0, 0.0, config.resolution.sites, config.resolution.points_per_site);
    PotentialField field;
    field.add_lattice(config.lattice);
    if (depth > 0.0) {
        TweezerSpec tw;
        tw.depth = depth;
        tw.waist = config.waist;
        field.add_tweezer(tw);
    }
    const EigenSet states = stationary_states(field, grid, 1);
    const double omega = trap_frequency(field, 0.0).omega;
    const HygieneReport r = numerics_hygiene(field, states.ground(), omega, config.resolution.steps_per_period);
    add_check(outcome, "norm drift per step", r.max_step_norm_drift, HygieneReport::step_norm_limit,
              r.max_step_norm_drift < HygieneReport::step_norm_limit);
    add_check(outcome, "norm drift overall", r.norm_drift, HygieneReport::norm_limit,
              r.norm_drift < HygieneReport::norm_limit);
    add_check(outcome, "energy drift over 100 periods", r.energy_drift, HygieneReport::energy_limit,
              r.energy_drift < HygieneReport::energy_limit);
}

std::string summary_text(const ScenarioOutcome& outcome) {
    std::ostringstream out;
    for (const auto& [key, value] : outcome.summary) out << key << " = " << format_double(value) << '\n';
    return out.str();
}

std::map<std::string, std::string> coefficient_metadata(const ScenarioConfig& config) {
    return {{"scenario", std::string(to_string(config.scenario))},
            {"parameters", parameter_hash(config)},
            {"version", std::string(version())}};
}

// ---------------------------------------------------------------- ramp-up

void run_rampup_scan(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                     Artifacts& art, ScenarioOutcome& outcome) {
    const RampupSetup setup(config.lattice, config.rampup_depth, config.waist, config.resolution);
    const std::vector<double> times = linspace(config.rampup_t_min, config.rampup_t_max, config.rampup_points);
    const std::vector<double> numeric =
        parallel_map(times.size(), config.threads, [&](std::size_t i) { return setup.excitation(times[i]); });

    std::vector<Row> rows;
    std::size_t best = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double xi = harmonic::adiabaticity_for_rampup(times[i], setup.omega_initial(), setup.omega_final());
        rows.push_back({units.to_microseconds(times[i]), numeric[i], harmonic::envelope_excitation(xi),
                        harmonic::rampup_excitation(times[i], xi, setup.omega_initial()), xi});
        if (numeric[i] < numeric[best]) best = i;
    }
    art.csv("rampup_scan.csv", {"T_us", "P_e_numeric", "P_e_envelope", "P_e_analytic", "xi"}, rows);

    // first local minimum of the numerical curve
    std::size_t first_min = times.size();
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (numeric[i] < numeric[i - 1] && numeric[i] <= numeric[i + 1]) {
            first_min = i;
            break;
        }
    outcome.summary = {{"omega_initial_khz", units.to_si_angular(setup.omega_initial()) / (2e3 * pi)},
                       {"omega_final_khz", units.to_si_angular(setup.omega_final()) / (2e3 * pi)},
                       {"global_minimum_us", units.to_microseconds(times[best])},
                       {"global_minimum_p_e", numeric[best]}};
    if (first_min < times.size()) {
        outcome.summary.emplace_back("first_minimum_us", units.to_microseconds(times[first_min]));
        outcome.summary.emplace_back("first_minimum_p_e", numeric[first_min]);
    }
    art.text("rampup_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.rampup_depth);
        const RampupSetup fine(config.lattice, config.rampup_depth, config.waist, config.resolution.doubled());
        const std::vector<double> refined =
            parallel_map(times.size(), config.threads, [&](std::size_t i) { return fine.excitation(times[i]); });
        for (std::size_t i = 0; i < times.size(); ++i)
            add_convergence(outcome, "P_e(" + format_double(units.to_microseconds(times[i])) + " us)", numeric[i],
                            refined[i]);
    }
}

// -------------------------------------------------------------- transport

double transport_xi(double duration, double omega, double spacing) {
    const double sigma = std::sqrt(1.0 / (UnitSystem::mass_internal * omega));
    return spacing / duration / (std::sqrt(2.0) * sigma * omega);
}

Resolution transport_resolution(const ScenarioConfig& config) {
    Resolution r = config.resolution;
    r.steps_per_period = config.transport_steps_per_period;
    return r;
}

void run_transport_scan(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                        Artifacts& art, ScenarioOutcome& outcome) {
    const std::vector<double> times =
        linspace(config.transport_t_min, config.transport_t_max, config.transport_points);
    const TransportSetup base(config.lattice, times.front(), config.tweezer_depth, config.waist,
                              transport_resolution(config));
    auto scan = [&](const Resolution& res) {
        const TransportSetup setup = base.with_resolution(res);
        return parallel_map(times.size(), config.threads,
                            [&](std::size_t i) { return setup.with_duration(times[i]).excitation({}); });
    };
    const std::vector<double> numeric = scan(transport_resolution(config));
    const double omega = base.trap_omega();

    std::vector<Row> rows;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double xi = transport_xi(times[i], omega, config.lattice.spacing);
        rows.push_back({units.to_microseconds(times[i]), numeric[i], harmonic::envelope_excitation(xi),
                        harmonic::transport_excitation(times[i], xi, omega), xi});
    }
    art.csv("transport_scan.csv", {"T_us", "P_e_numeric", "P_e_envelope", "P_e_analytic", "xi"}, rows);

    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (numeric[i] < numeric[i - 1] && numeric[i] <= numeric[i + 1]) minima.push_back(i);
    outcome.summary = {{"trap_khz", units.to_si_angular(omega) / (2e3 * pi)},
                       {"local_minima", static_cast<double>(minima.size())}};
    for (std::size_t m = 0; m < minima.size(); ++m) {
        outcome.summary.emplace_back("minimum_" + std::to_string(m + 1) + "_us",
                                     units.to_microseconds(times[minima[m]]));
        outcome.summary.emplace_back("minimum_" + std::to_string(m + 1) + "_p_e", numeric[minima[m]]);
    }
    art.text("transport_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.tweezer_depth);
        const std::vector<double> refined = scan(transport_resolution(config).doubled());
        for (std::size_t i = 0; i < times.size(); ++i)
            add_convergence(outcome, "P_e(" + format_double(units.to_microseconds(times[i])) + " us)", numeric[i],
                            refined[i]);
    }
}

// Coefficients from config.transport_coefficients when given and `optimize`
// is off; otherwise an optimization (started from the file, if any) written
// next to the other artifacts.
std::vector<double> transport_coefficients(const ScenarioConfig& config, const TransportSetup& setup,
                                           Artifacts& art, ScenarioOutcome& outcome, bool verify, bool optimize) {
    std::vector<double> start;
    if (!config.transport_coefficients.empty()) {
        start = read_coefficients(config.transport_coefficients);
        if (!optimize) return start;
    }
    SimplexOptions opts = transport_simplex_defaults(config.transport_harmonics);
    if (config.transport_max_evaluations > 0) opts.max_evaluations = config.transport_max_evaluations;
    const TransportOptimization opt = optimize_transport(setup, config.transport_harmonics, opts, true, start);

    auto meta = coefficient_metadata(config);
    meta["excitation"] = format_double(opt.result.best_value);
    meta["baseline"] = format_double(opt.baseline);
    meta["refined_excitation"] = format_double(opt.verification.refined_objective);
    meta["verification_agrees"] = opt.verification.agrees ? "true" : "false";
    meta["evaluations"] = std::to_string(opt.result.evaluations);
    write_coefficients(art.path("transport_coefficients.txt"), meta, opt.result.best);
    art.note("transport_coefficients.txt");

    std::vector<Row> history;
    for (std::size_t i = 0; i < opt.result.history.size(); ++i)
        history.push_back({static_cast<double>(i + 1), opt.result.history[i]});
    art.csv("transport_history.csv", {"evaluation", "best_excitation"}, history);

    outcome.summary.emplace_back("baseline_p_e", opt.baseline);
    outcome.summary.emplace_back("optimized_p_e", opt.result.best_value);
    outcome.summary.emplace_back("refined_p_e", opt.verification.refined_objective);
    outcome.summary.emplace_back("evaluations", static_cast<double>(opt.result.evaluations));
    outcome.summary.emplace_back("converged", opt.result.converged ? 1.0 : 0.0);
    outcome.summary.emplace_back("verification_agrees", opt.verification.agrees ? 1.0 : 0.0);
    if (verify)
        add_check(outcome, "optimizer result re-checked at doubled resolution",
                  opt.verification.refined_objective, opt.verification.objective, opt.verification.agrees);
    return opt.result.best;
}

void run_optimize_transport(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                            Artifacts& art, ScenarioOutcome& outcome) {
    const TransportSetup setup(config.lattice, config.transport_duration, config.tweezer_depth, config.waist,
                               transport_resolution(config));
    outcome.summary.emplace_back("duration_us", units.to_microseconds(config.transport_duration));
    const std::vector<double> coeffs = transport_coefficients(config, setup, art, outcome, options.verify, true);

    const ControlRamp ramp = transport_ramp(setup.duration(), coeffs, setup.depth());
    std::vector<Row> rows;
    for (double t : linspace(0.0, setup.duration(), 501))
        rows.push_back({units.to_microseconds(t), ramp.position(t), ramp.position_profile().base_value(t)});
    art.csv("transport_ramp.csv", {"t_us", "position_alat", "linear_alat"}, rows);
    if (config.frames >= 2) {
        const Trajectory traj = setup.run(coeffs, config.frames).trajectory;
        std::vector<Row> frames;
        for (std::size_t f = 0; f < traj.states.size(); ++f) {
            const auto rho = traj.states[f].density();
            const Grid& g = traj.states[f].grid();
            for (std::size_t i = 0; i < g.size(); ++i)
                frames.push_back({units.to_microseconds(traj.times[f]), g.x(i), rho[i]});
        }
        art.csv("transport_trajectory.csv", {"t_us", "x_alat", "density"}, frames);
    }
    art.text("transport_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.tweezer_depth);
        const double coarse = setup.excitation(coeffs);
        add_convergence(outcome, "optimized P_e", coarse,
                        setup.with_resolution(transport_resolution(config).doubled()).excitation(coeffs));
    }
}

void run_multisite(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                   Artifacts& art, ScenarioOutcome& outcome) {
    (void)units;
    const TransportSetup setup(config.lattice, config.transport_duration, config.tweezer_depth, config.waist,
                               transport_resolution(config));
    const std::vector<double> coeffs = transport_coefficients(config, setup, art, outcome, options.verify, false);
    const std::vector<double> errors = setup.multisite(coeffs, config.multisite_sites);

    std::vector<Row> rows;
    for (std::size_t n = 0; n < errors.size(); ++n) rows.push_back({static_cast<double>(n + 1), errors[n]});
    art.csv("multisite.csv", {"sites", "P_e"}, rows);

    const double single = errors.front();
    const double worst = *std::max_element(errors.begin(), errors.end());
    outcome.summary.emplace_back("single_site_p_e", single);
    outcome.summary.emplace_back("max_p_e", worst);
    outcome.summary.emplace_back("max_over_single", worst / single);
    if (errors.size() >= 8) outcome.summary.emplace_back("period_sites", dominant_period(errors));
    art.text("multisite_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.tweezer_depth);
        const std::vector<double> refined =
            setup.with_resolution(transport_resolution(config).doubled()).multisite(coeffs, config.multisite_sites);
        for (std::size_t n = 0; n < errors.size(); ++n)
            add_convergence(outcome, "P_e(" + std::to_string(n + 1) + " sites)", errors[n], refined[n]);
    }
}

// ---------------------------------------------------------------- band map

BandMapSpec bandmap_spec(const ScenarioConfig& config) {
    BandMapSpec spec;
    spec.start_depth = config.bandmap_start_depth;
    spec.aux_depth = config.bandmap_aux_depth;
    spec.duration = config.bandmap_duration;
    spec.harmonics = config.bandmap_harmonics;
    spec.waist = config.waist;
    return spec;
}

// Same contract as transport_coefficients; the search is staged from low to
// full harmonic count.
std::vector<double> bandmap_coefficients(const ScenarioConfig& config, const BandMapSetup& setup, Artifacts& art,
                                         ScenarioOutcome& outcome, bool verify, bool optimize) {
    std::vector<double> start;
    if (!config.bandmap_coefficients.empty()) {
        start = read_coefficients(config.bandmap_coefficients);
        if (!optimize) return repack_harmonics(start, config.bandmap_harmonics);
    }
    BandMapStages stages;
    stages.harmonics.clear();
    for (std::size_t k : config.bandmap_stages)
        if (k < config.bandmap_harmonics) stages.harmonics.push_back(k);
    stages.evaluations_per_coefficient = config.bandmap_evaluations_per_coefficient;
    stages.max_evaluations = config.bandmap_max_evaluations;
    const BandMapOptimization opt = optimize_bandmap_staged(setup, stages, true, start);

    auto meta = coefficient_metadata(config);
    meta["infidelity"] = format_double(opt.result.best_value);
    meta["baseline_infidelity"] = format_double(opt.baseline.infidelity);
    meta["refined_infidelity"] = format_double(opt.verification.refined_objective);
    meta["verification_agrees"] = opt.verification.agrees ? "true" : "false";
    meta["evaluations"] = std::to_string(opt.result.evaluations);
    meta["layout"] = "depth harmonics then position harmonics";
    write_coefficients(art.path("bandmap_coefficients.txt"), meta, opt.result.best);
    art.note("bandmap_coefficients.txt");

    std::vector<Row> history;
    for (std::size_t i = 0; i < opt.result.history.size(); ++i)
        history.push_back({static_cast<double>(i + 1), opt.result.history[i]});
    art.csv("bandmap_history.csv", {"evaluation", "best_infidelity"}, history);

    outcome.summary.emplace_back("baseline_infidelity", opt.baseline.infidelity);
    outcome.summary.emplace_back("evaluations", static_cast<double>(opt.result.evaluations));
    outcome.summary.emplace_back("converged", opt.result.converged ? 1.0 : 0.0);
    outcome.summary.emplace_back("refined_infidelity", opt.verification.refined_objective);
    outcome.summary.emplace_back("verification_agrees", opt.verification.agrees ? 1.0 : 0.0);
    if (verify)
        add_check(outcome, "optimizer result re-checked at doubled resolution",
                  opt.verification.refined_objective, opt.verification.objective, opt.verification.agrees);
    return opt.result.best;
}

// Interaction phase of the two atoms over the mapping, with the transverse
// confinement taken at the right site.
double mapping_interaction_phase(const BandMapSetup& setup, const BandMapOutcome& run, const BandMapRamps& ramps,
                                 const UnitSystem& units) {
    const PotentialField field = setup.field(ramps);
    const double a_s = units.from_si_length(rubidium87().scattering_length_background);
    const double x = setup.spec().right_site;
    return bandmap_interaction_phase(run.transported, run.stationary, a_s, [&](double t) {
        return transverse_frequencies(setup.lattice(), field, x, t);
    });
}

void run_optimize_bandmap(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                          Artifacts& art, ScenarioOutcome& outcome) {
    const BandMapSetup setup(config.lattice, bandmap_spec(config), config.resolution);
    const std::vector<double> packed = bandmap_coefficients(config, setup, art, outcome, options.verify, true);
    const std::size_t k = packed.size() / 2;
    const BandMapOutcome run = setup.run_packed(packed, {}, 301);
    const BandMapRamps ramps =
        bandmap_ramp(setup.spec(), std::span(packed).subspan(0, k), std::span(packed).subspan(k));

    outcome.summary.emplace_back("transported_fidelity", run.transported_fidelity);
    outcome.summary.emplace_back("stationary_fidelity", run.stationary_fidelity);
    outcome.summary.emplace_back("infidelity", run.infidelity);
    outcome.summary.emplace_back("interaction_phase_rad", mapping_interaction_phase(setup, run, ramps, units));

    std::vector<Row> ramp_rows;
    for (double t : linspace(0.0, setup.spec().duration, 501))
        ramp_rows.push_back({units.to_microseconds(t), ramps.transport.depth(t), ramps.transport.position(t),
                             ramps.transport.depth_profile().base_value(t),
                             ramps.transport.position_profile().base_value(t)});
    art.csv("bandmap_ramps.csv", {"t_us", "depth_Er", "position_alat", "linear_depth_Er", "linear_position_alat"},
            ramp_rows);

    const Grid& grid = *setup.grid();
    std::vector<Row> state_rows;
    for (std::size_t i = 0; i < grid.size(); ++i)
        state_rows.push_back({grid.x(i), std::norm(run.transported.final_state[i]),
                              std::norm(run.stationary.final_state[i]), std::norm(setup.transported_target()[i]),
                              std::norm(setup.stationary_target()[i])});
    art.csv("bandmap_states.csv",
            {"x_alat", "transported_density", "stationary_density", "excited_target_density",
             "ground_target_density"},
            state_rows);
    art.text("bandmap_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.bandmap_start_depth);
        const double refined = setup.with_resolution(config.resolution.doubled()).run_packed(packed).infidelity;
        add_convergence(outcome, "band map infidelity", run.infidelity, refined);
    }
}

void run_sensitivity(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                     Artifacts& art, ScenarioOutcome& outcome) {
    const BandMapSetup setup(config.lattice, bandmap_spec(config), config.resolution);
    const std::vector<double> packed = bandmap_coefficients(config, setup, art, outcome, options.verify, false);
    const std::vector<double> offsets =
        linspace(-config.sensitivity_offset_max, config.sensitivity_offset_max, config.sensitivity_offset_points);
    const std::vector<double> scales = linspace(1.0 - config.sensitivity_scale_span,
                                                1.0 + config.sensitivity_scale_span, config.sensitivity_scale_points);
    const SensitivityMap map = sensitivity_map(setup, packed, offsets, scales, config.threads);
    std::size_t failed = 0;
    std::string failures;
    for (std::size_t c = 0; c < map.errors.size(); ++c)
        if (!map.errors[c].empty()) {
            ++failed;
            failures += "cell " + std::to_string(c) + ": " + map.errors[c] + "\n";
        }
    outcome.summary.emplace_back("failed_cells", static_cast<double>(failed));
    if (failed > 0) art.text("sensitivity_failures.txt", failures);

    std::vector<Row> rows;
    for (std::size_t j = 0; j < scales.size(); ++j)
        for (std::size_t i = 0; i < offsets.size(); ++i)
            rows.push_back({units.to_si_length(offsets[i]) * 1e9, scales[j], map.at(i, j)});
    art.csv("sensitivity_map.csv", {"offset_nm", "scale", "infidelity"}, rows);

    const auto contours = extract_contours(map, config.sensitivity_levels);
    std::vector<Row> contour_rows;
    for (std::size_t l = 0; l < contours.size(); ++l)
        for (std::size_t p = 0; p < contours[l].points.size(); ++p)
            contour_rows.push_back({contours[l].level, static_cast<double>(l), static_cast<double>(p),
                                    units.to_si_length(contours[l].points[p].first) * 1e9,
                                    contours[l].points[p].second, contours[l].closed ? 1.0 : 0.0});
    art.csv("sensitivity_contours.csv", {"level", "line", "point", "offset_nm", "scale", "closed"}, contour_rows);

    const auto [bi, bj] = map.minimum();
    outcome.summary.emplace_back("minimum_offset_nm", units.to_si_length(offsets[bi]) * 1e9);
    outcome.summary.emplace_back("minimum_scale", scales[bj]);
    outcome.summary.emplace_back("minimum_infidelity", map.at(bi, bj));
    if (!config.sensitivity_levels.empty()) {
        const double level = config.sensitivity_levels.front();
        double max_offset = 0.0, max_scale = 0.0;
        for (const auto& c : contours) {
            if (c.level != level) continue;
            for (const auto& [x, s] : c.points) {
                max_offset = std::max(max_offset, std::abs(units.to_si_length(x) * 1e9));
                max_scale = std::max(max_scale, std::abs(s - 1.0));
            }
        }
        outcome.summary.emplace_back("first_level", level);
        outcome.summary.emplace_back("first_level_offset_extent_nm", max_offset);
        outcome.summary.emplace_back("first_level_scale_extent", max_scale);
    }
    art.text("sensitivity_summary.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.bandmap_start_depth);
        const BandMapSetup fine = setup.with_resolution(config.resolution.doubled());
        const std::size_t ci = offsets.size() / 2, cj = scales.size() / 2;
        ErrorInjection err;
        err.pointing_offset = offsets[ci];
        err.intensity_scale = scales[cj];
        add_convergence(outcome, "centre cell infidelity", map.at(ci, cj), fine.run_packed(packed, err).infidelity);
        err.pointing_offset = offsets.front();
        err.intensity_scale = scales.front();
        add_convergence(outcome, "corner cell infidelity", map.at(0, 0), fine.run_packed(packed, err).infidelity);
    }
}

// ---------------------------------------------------------- gates, budgets

struct TweezerInteraction {
    InteractionParams params;
    double lattice_u = 0.0;
};

TweezerInteraction interactions(const ScenarioConfig& config, const Resolution& res, const UnitSystem& units) {
    const GridPtr grid = Grid::around(0.0, 0.0, res.sites, res.points_per_site);
    PotentialField field;
    field.add_lattice(config.lattice);
    TweezerSpec tw;
    tw.depth = config.tweezer_depth;
    tw.waist = config.waist;
    field.add_tweezer(tw);
    const EigenSet states = stationary_states(field, grid, 1);
    TweezerInteraction out;
    out.params = interaction_params(states.ground(), transverse_frequencies(config.lattice, field, 0.0),
                                    rubidium87(), units);

    PotentialField lattice_only;
    lattice_only.add_lattice(config.lattice);
    const WaveFunction site = site_ground_state(config.lattice, grid, 0.0);
    const double w = lattice_omega(config.lattice);
    out.lattice_u = interaction_energy(site, site, units.from_si_length(rubidium87().scattering_length_background),
                                       {w, w});
    return out;
}

void run_budgets(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                 Artifacts& art, ScenarioOutcome& outcome) {
    std::ostringstream tables;
    tables << "gate transport-phase, general n\n"
           << "step          amount    time\n"
           << "ramp-up/down  6         11 us\n"
           << "transport     2(n+1)    25 us\n"
           << "phase gate    1         83 us\n"
           << "overall       -         (199 + 50 n) us\n\n"
           << "gate exchange, general n\n"
           << "step          amount    time\n"
           << "ramp-up/down  2         11 us\n"
           << "transport     2n        25 us\n"
           << "phase gate    1         125 us\n"
           << "merge/split   2         75 us\n"
           << "overall       -         (297 + 50 n) us\n\n";
    std::vector<Row> rows;
    for (GateKind gate : {GateKind::TransportPhase, GateKind::Exchange}) {
        for (std::size_t n : config.budget_sites) {
            const GateBudget b = gate_budget(gate, n);
            tables << "gate " << to_string(gate) << ", n = " << n << '\n' << b.table() << '\n';
            rows.push_back({gate == GateKind::TransportPhase ? 0.0 : 1.0, static_cast<double>(n), b.total_us(),
                            gate_budget_closed_form(gate, n)});
        }
    }
    art.text("budgets.txt", tables.str());
    art.csv("budgets.csv", {"gate", "sites", "total_us", "closed_form_us"}, rows);

    std::ostringstream seq;
    for (std::size_t n : config.budget_sites) {
        seq << "spin-dependent transport gate, n = " << n << '\n';
        double total = 0.0;
        for (const auto& s : spin_dependent_gate_sequence(n)) {
            seq << "  " << s.action << " | " << format_double(s.duration_us) << " us | moving: " << s.moving
                << " | " << s.potentials << (s.echo_pulse ? " | echo pulse" : "") << '\n';
            total += s.duration_us;
        }
        seq << "  total " << format_double(total) << " us\n\n";
    }
    art.text("gate_sequence.txt", seq.str());

    const TweezerInteraction u = interactions(config, config.resolution, units);
    const SwapTimes swap = swap_times(u.params.u_gg);
    outcome.summary = {
        {"u_gg_khz", units.energy_to_hz(u.params.u_gg) / 1e3},
        {"u_eg_khz", units.energy_to_hz(swap.u_eg) / 1e3},
        {"swap_us", units.to_microseconds(swap.swap)},
        {"entangling_us", units.to_microseconds(swap.entangling)},
        {"phase_gate_us_at_6khz", units.to_microseconds(phase_gate_time(units.energy_from_hz(6e3), pi))},
        {"phase_gate_us", units.to_microseconds(phase_gate_time(u.params.u_gg, pi))},
        {"merge_gate_ms",
         units.to_si_time(merge_gate_phase_time(u.params.u_up_up, u.params.u_up_down)) * 1e3},
    };
    art.text("gate_times.txt", summary_text(outcome));

    if (options.verify) {
        add_hygiene(outcome, config, config.tweezer_depth);
        const TweezerInteraction fine = interactions(config, config.resolution.doubled(), units);
        add_convergence(outcome, "U_gg", u.params.u_gg, fine.params.u_gg);
    }
}

void run_error_report(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                      Artifacts& art, ScenarioOutcome& outcome) {
    const SpeciesData& rb = rubidium87();
    const QubitStates qs = qubit_states(QubitPair::FieldSensitive);
    const double depth_j = units.to_si_energy(config.tweezer_depth);

    struct Line {
        std::string name;
        double rate;
        double exposure;
    };
    std::vector<Line> lines;
    const double far_rate = scattering_rate(tweezer_scattering(ScatteringContext::FarDetunedTweezer,
                                                               config.tweezer_wavelength, Polarization::Linear,
                                                               qs.up, depth_j, config.tweezer_exposure));
    lines.push_back({"far-detuned-tweezer", far_rate, config.tweezer_exposure});
    const double null = null_wavelength(qs.down, Polarization::SigmaMinus, rb);
    const double spin_rate = scattering_rate(tweezer_scattering(
        ScatteringContext::SpinDependentTweezer, null, Polarization::SigmaMinus, qs.up, depth_j, config.spin_exposure));
    lines.push_back({"spin-dependent-tweezer", spin_rate, config.spin_exposure});
    const double lattice_rate = scattering_rate(
        lattice_scattering(units.lattice_wavelength(), qs.up, units.to_si_energy(config.lattice.depth), 3,
                           config.lattice_exposure));
    lines.push_back({"lattice", lattice_rate, config.lattice_exposure});

    std::vector<Row> rows;
    std::ostringstream report;
    report << "scattering\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const double t = units.to_si_time(lines[i].exposure);
        const double p = scattering_probability(lines[i].rate, t);
        rows.push_back({static_cast<double>(i), lines[i].rate, t * 1e6, p});
        report << "  " << lines[i].name << ": " << format_double(lines[i].rate) << " Hz over "
               << format_double(t * 1e6) << " us -> " << format_double(p) << '\n';
        outcome.summary.emplace_back(lines[i].name + "_rate_hz", lines[i].rate);
        outcome.summary.emplace_back(lines[i].name + "_probability", p);
    }
    report << "  (source index: 0 far-detuned tweezer, 1 spin-dependent tweezer, 2 lattice)\n";
    report << "  null wavelength for the down state in sigma- light: " << format_double(null * 1e9) << " nm\n";
    outcome.summary.emplace_back("null_wavelength_nm", null * 1e9);
    art.csv("error_budget.csv", {"source", "rate_hz", "exposure_us", "probability"}, rows);

    report << "dephasing\n";
    const double hold_s = units.to_si_time(config.hold);
    for (QubitPair pair : {QubitPair::FieldSensitive, QubitPair::Clock}) {
        DephasingScenario d;
        d.field_noise = config.field_noise;
        d.hold = hold_s;
        const DephasingResult r = dephasing_budget(d, pair, rb);
        report << "  " << to_string(pair) << ": dB = " << format_double(config.field_noise * 1e6) << " uG, T_c = "
               << (r.infinite_coherence ? std::string("inf") : format_double(r.coherence_time * 1e3) + " ms")
               << ", phase error over " << format_double(hold_s * 1e6) << " us = " << format_double(r.phase_error)
               << (r.note.empty() ? "" : " (" + r.note + ")") << '\n';
        if (pair == QubitPair::FieldSensitive) {
            outcome.summary.emplace_back("coherence_time_ms", r.coherence_time * 1e3);
            outcome.summary.emplace_back("field_phase_error", r.phase_error);
        }
    }
    const double intensity_phase = intensity_dephasing(config.tweezer_depth, config.relative_intensity, config.hold);
    report << "  intensity: dI/I = " << format_double(config.relative_intensity) << " at "
           << format_double(config.tweezer_depth) << " Er over " << format_double(hold_s * 1e6) << " us -> "
           << format_double(intensity_phase) << " rad (2 pi x " << format_double(intensity_phase / (2.0 * pi))
           << ")\n";
    outcome.summary.emplace_back("intensity_phase_rad", intensity_phase);
    art.text("error_report.txt", report.str());

    if (options.verify) add_hygiene(outcome, config, config.tweezer_depth);
}

void run_constants(const ScenarioConfig& config, const RunOptions& options, const UnitSystem& units,
                   Artifacts& art, ScenarioOutcome& outcome) {
    PotentialField lattice;
    lattice.add_lattice(config.lattice);
    PotentialField tweezer;
    TweezerSpec tw;
    tw.depth = config.tweezer_depth;
    tw.waist = config.waist;
    tweezer.add_tweezer(tw);
    PotentialField both = lattice;
    both.add_tweezer(tw);

    const TrapFrequency f_lat = trap_frequency(lattice, 0.0);
    const TrapFrequency f_tw = trap_frequency(tweezer, 0.0);
    const TrapFrequency f_both = trap_frequency(both, 0.0);
    const BlochBand band = bloch_bands(config.lattice, 65);
    const TweezerInteraction u = interactions(config, config.resolution, units);

    auto khz = [&](double w) { return units.to_si_angular(w) / (2e3 * pi); };
    auto nm = [&](double x) { return units.to_si_length(x) * 1e9; };
    outcome.summary = {
        {"lattice_trap_khz", khz(f_lat.omega)},         {"lattice_sigma_nm", nm(f_lat.sigma)},
        {"tweezer_trap_khz", khz(f_tw.omega)},          {"tweezer_sigma_nm", nm(f_tw.sigma)},
        {"combined_trap_khz", khz(f_both.omega)},       {"tunnel_coupling_hz", units.energy_to_hz(band.tunnel_coupling)},
        {"lattice_interaction_khz", units.energy_to_hz(u.lattice_u) / 1e3},
        {"tweezer_interaction_khz", units.energy_to_hz(u.params.u_gg) / 1e3},
    };
    art.text("constants.txt", constants_report(units, rubidium87()) + summary_text(outcome));
    std::vector<Row> potential;
    for (double x : linspace(-2.0, 2.0, 801)) potential.push_back({x, lattice(x), tweezer(x), both(x)});
    art.csv("potential.csv", {"x_alat", "lattice_Er", "tweezer_Er", "combined_Er"}, potential);

    if (options.verify) {
        add_hygiene(outcome, config, config.tweezer_depth);
        const TweezerInteraction fine = interactions(config, config.resolution.doubled(), units);
        add_convergence(outcome, "lattice interaction", u.lattice_u, fine.lattice_u);
        add_convergence(outcome, "tweezer interaction", u.params.u_gg, fine.params.u_gg);
    }
}

}  // namespace

std::string_view version() { return TWEEZER_VERSION; }

std::string parameter_hash(const ScenarioConfig& config) {
    ScenarioConfig c = config;
    c.output.clear();
    c.threads = 1;
    return hex64(fnv1a(resolved_config(c)));
}

bool ScenarioOutcome::checks_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double ScenarioOutcome::value(std::string_view key) const {
    for (const auto& [k, v] : summary)
        if (k == key) return v;
    throw NumericError("no summary value '" + std::string(key) + "'");
}

ScenarioOutcome run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    config.resolution.validate();
    transport_resolution(config).validate();
    const UnitSystem units = UnitSystem::standard();
    ScenarioOutcome outcome;
    Artifacts art(config, outcome);
    art.raw("resolved_config.txt", resolved_config(config));

    switch (config.scenario) {
    case ScenarioId::RampupScan:
        run_rampup_scan(config, options, units, art, outcome);
        break;
    case ScenarioId::TransportScan:
        run_transport_scan(config, options, units, art, outcome);
        break;
    case ScenarioId::OptimizeTransport:
        run_optimize_transport(config, options, units, art, outcome);
        break;
    case ScenarioId::OptimizeBandmap:
        run_optimize_bandmap(config, options, units, art, outcome);
        break;
    case ScenarioId::Multisite:
        run_multisite(config, options, units, art, outcome);
        break;
    case ScenarioId::SensitivityMap:
        run_sensitivity(config, options, units, art, outcome);
        break;
    case ScenarioId::Budgets:
        run_budgets(config, options, units, art, outcome);
        break;
    case ScenarioId::ErrorReport:
        run_error_report(config, options, units, art, outcome);
        break;
    case ScenarioId::Constants:
        run_constants(config, options, units, art, outcome);
        break;
    }

    if (options.verify) {
        std::ostringstream out;
        out << "check,value,limit,passed\n";
        for (const auto& c : outcome.checks)
            out << '"' << c.name << "\"," << format_double(c.value) << ',' << format_double(c.limit) << ','
                << (c.passed ? 1 : 0) << '\n';
        art.text("verify.csv", out.str());
    }
    return outcome;
}

}  // namespace tweezer
