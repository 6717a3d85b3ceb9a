#include "tweezer/budget_errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "tweezer/errors.hpp"

namespace tweezer {

namespace {
constexpr double pi = std::numbers::pi;
}

std::string_view to_string(ScatteringContext context) {
    switch (context) {
    case ScatteringContext::Lattice:
        return "lattice";
    case ScatteringContext::FarDetunedTweezer:
        return "far-detuned-tweezer";
    case ScatteringContext::SpinDependentTweezer:
        return "spin-dependent-tweezer";
    }
    return "unknown";
}

void ScatteringScenario::validate() const {
    if (!(depth >= 0.0)) throw DomainError("scattering: depth must be non-negative");
    if (!(exposure >= 0.0)) throw DomainError("scattering: exposure must be non-negative");
    if (lines.empty()) throw DomainError("scattering: no lines");
    for (const auto& l : lines)
        if (!(std::abs(l.detuning) > l.linewidth)) throw DomainError("scattering: laser is on resonance");
}

ScatteringScenario tweezer_scattering(ScatteringContext context, double wavelength, Polarization polarization,
                                      const HyperfineState& state, double depth_joules, double exposure,
                                      const SpeciesData& species) {
    ScatteringScenario s;
    s.context = context;
    s.depth = depth_joules;
    s.exposure = exposure;
    s.laser_frequency = 2.0 * pi * codata::c / wavelength;
    try {
        s.lines = light_shift_lines(wavelength, polarization, state, species.line_half, species.line_three_half,
                                    species.hyperfine_splitting);
    } catch (const ResonanceError& e) {
        throw DomainError(e.what());
    }
    return s;
}

ScatteringScenario lattice_scattering(double wavelength, const HyperfineState& state, double depth_joules,
                                      std::size_t axes, double exposure, const SpeciesData& species) {
    ScatteringScenario s;
    s.context = ScatteringContext::Lattice;
    s.depth = depth_joules;
    s.exposure = exposure;
    s.beams = axes;
    s.counter_rotating = true;
    s.laser_frequency = 2.0 * pi * codata::c / wavelength;
    try {
        s.lines = light_shift_lines(wavelength, Polarization::Linear, state, species.lattice_line_half,
                                    species.lattice_line_three_half, species.hyperfine_splitting, true);
    } catch (const ResonanceError& e) {
        throw DomainError(e.what());
    }
    return s;
}

double scattering_rate(const ScatteringScenario& s) {
    s.validate();
    double total_shift = 0.0;
    for (const auto& l : s.lines) total_shift += l.shift_per_intensity;
    if (total_shift == 0.0) throw DomainError("scattering: light shift vanishes, depth cannot be reached");
    const double intensity = s.depth / std::abs(total_shift);

    double rate = 0.0;
    for (const auto& l : s.lines) {
        const double share = std::abs(l.shift_per_intensity) * intensity;
        double per_energy = l.linewidth / std::abs(l.detuning);
        if (s.counter_rotating) {
            // Gamma (w/w0)^3 |1/(w0 - w) + 1/(w0 + w)| replaces Gamma / |Delta|; the
            // share itself already carries the counter-rotating term.
            const double w = s.laser_frequency;
            const double w0 = l.line_frequency;
            const double ratio = w / w0;
            per_energy = l.linewidth * ratio * ratio * ratio * std::abs(1.0 / (w0 - w) + 1.0 / (w0 + w));
        }
        rate += per_energy * share / codata::hbar;
    }
    return rate * static_cast<double>(s.beams);
}

double scattering_probability(double rate, double exposure) {
    if (!(rate >= 0.0) || !(exposure >= 0.0)) throw DomainError("scattering probability: negative input");
    return -std::expm1(-rate * exposure);
}

void DephasingScenario::validate() const {
    if (!(field_noise >= 0.0) || !(relative_intensity >= 0.0) || !(hold >= 0.0) || !(depth >= 0.0))
        throw DomainError("dephasing: inputs must be non-negative");
}

DephasingResult dephasing_budget(const DephasingScenario& d, QubitPair pair, const SpeciesData& species) {
    d.validate();
    const ZeemanRate zr = zeeman_splitting_rate(pair, species);
    DephasingResult r;
    r.magic = zr.magic_field;
    r.energy_spread = zr.energy_per_tesla * d.field_noise * codata::gauss;
    if (zr.magic_field)
        r.note = "first-order insensitive at the magic field of " + std::to_string(species.magic_field) + " G";
    if (r.energy_spread == 0.0) {
        r.infinite_coherence = true;
        r.coherence_time = std::numeric_limits<double>::infinity();
        r.phase_error = 0.0;
        if (r.note.empty()) r.note = "no field noise";
        return r;
    }
    r.coherence_time = codata::h / r.energy_spread;
    r.phase_error = d.hold / r.coherence_time;
    return r;
}

double intensity_dephasing(double depth, double relative_noise, double hold, double hbar) {
    if (!(depth >= 0.0) || !(relative_noise >= 0.0) || !(hold >= 0.0) || !(hbar > 0.0))
        throw DomainError("intensity dephasing: inputs must be non-negative");
    return relative_noise * depth * hold / hbar;
}

double SensitivityMap::at(std::size_t offset_index, std::size_t scale_index) const {
    return infidelity.at(scale_index * offsets.size() + offset_index);
}

std::pair<std::size_t, std::size_t> SensitivityMap::minimum() const {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < infidelity.size(); ++k)
        if (infidelity[k] < best_value) {
            best_value = infidelity[k];
            best = k;
        }
    if (!std::isfinite(best_value)) throw NumericError("sensitivity map has no finite cell");
    return {best % offsets.size(), best / offsets.size()};
}

SensitivityMap sensitivity_map(const BandMapSetup& setup, std::span<const double> packed,
                               std::span<const double> offsets, std::span<const double> scales,
                               std::size_t threads) {
    if (offsets.empty() || scales.empty()) throw DomainError("sensitivity map needs a non-empty grid");
    SensitivityMap map;
    map.offsets.assign(offsets.begin(), offsets.end());
    map.scales.assign(scales.begin(), scales.end());
    const std::size_t cells = offsets.size() * scales.size();
    map.infidelity.assign(cells, std::numeric_limits<double>::quiet_NaN());
    map.errors.assign(cells, {});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < cells; k = next++) {
            ErrorInjection err;
            err.pointing_offset = offsets[k % offsets.size()];
            err.intensity_scale = scales[k / offsets.size()];
            try {
                map.infidelity[k] = setup.run_packed(packed, err).infidelity;
            } catch (const std::exception& e) {
                map.errors[k] = e.what();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(threads, cells));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return map;
}

namespace {

struct Segment {
    std::size_t a;
    std::size_t b;
};

}  // namespace

std::vector<ContourLine> extract_contours(const SensitivityMap& map, std::span<const double> levels) {
    const std::size_t nx = map.offsets.size();
    const std::size_t ny = map.scales.size();
    std::vector<ContourLine> out;
    if (nx < 2 || ny < 2) return out;

    auto value = [&](std::size_t i, std::size_t j) { return map.infidelity[j * nx + i]; };
    // Edge ids: horizontal edge from (i,j) to (i+1,j) is 2(j nx + i), vertical
    // edge from (i,j) to (i,j+1) is 2(j nx + i) + 1.
    auto h_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * nx + i); };
    auto v_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * nx + i) + 1; };

    for (double level : levels) {
        auto crossing = [&](std::size_t id) -> std::pair<double, double> {
            const std::size_t base = id / 2;
            const std::size_t i = base % nx;
            const std::size_t j = base / nx;
            const bool vertical = id % 2 == 1;
            const std::size_t i2 = vertical ? i : i + 1;
            const std::size_t j2 = vertical ? j + 1 : j;
            const double fa = value(i, j);
            const double fb = value(i2, j2);
            const double s = (level - fa) / (fb - fa);
            return {map.offsets[i] + s * (map.offsets[i2] - map.offsets[i]),
                    map.scales[j] + s * (map.scales[j2] - map.scales[j])};
        };

        std::vector<Segment> segments;
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                const double c[4] = {value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
                if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || !std::isfinite(c[2]) || !std::isfinite(c[3]))
                    continue;
                bool above[4];
                for (int k = 0; k < 4; ++k) above[k] = c[k] >= level;
                // bottom, right, top, left
                const std::size_t edges[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
                const bool cut[4] = {above[0] != above[1], above[1] != above[2], above[3] != above[2],
                                     above[0] != above[3]};
                std::vector<int> crossed;
                for (int k = 0; k < 4; ++k)
                    if (cut[k]) crossed.push_back(k);
                if (crossed.size() == 2) {
                    segments.push_back({edges[crossed[0]], edges[crossed[1]]});
                } else if (crossed.size() == 4) {
                    const bool centre_above = 0.25 * (c[0] + c[1] + c[2] + c[3]) >= level;
                    if (centre_above == above[0]) {
                        // corners 0 and 2 are joined through the centre: cut off 1 and 3
                        segments.push_back({edges[0], edges[1]});
                        segments.push_back({edges[2], edges[3]});
                    } else {
                        segments.push_back({edges[3], edges[0]});
                        segments.push_back({edges[1], edges[2]});
                    }
                }
            }
        }

        std::map<std::size_t, std::vector<std::size_t>> by_edge;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            by_edge[segments[s].a].push_back(s);
            by_edge[segments[s].b].push_back(s);
        }
        std::vector<bool> used(segments.size(), false);
        auto trace = [&](std::size_t start_edge, std::size_t first_segment) {
            ContourLine line;
            line.level = level;
            std::size_t edge = start_edge;
            std::size_t seg = first_segment;
            line.points.push_back(crossing(edge));
            while (true) {
                used[seg] = true;
                edge = segments[seg].a == edge ? segments[seg].b : segments[seg].a;
                line.points.push_back(crossing(edge));
                std::size_t next_seg = segments.size();
                for (std::size_t cand : by_edge[edge])
                    if (!used[cand]) next_seg = cand;
                if (next_seg == segments.size()) break;
                seg = next_seg;
            }
            line.closed = edge == start_edge && line.points.size() > 2;
            return line;
        };
        // open polylines start at edges touched by a single segment
        for (const auto& [edge, segs] : by_edge)
            if (segs.size() == 1 && !used[segs[0]]) out.push_back(trace(edge, segs[0]));
        for (std::size_t s = 0; s < segments.size(); ++s)
            if (!used[s]) out.push_back(trace(segments[s].a, s));
    }
    return out;
}

}  // namespace tweezer
