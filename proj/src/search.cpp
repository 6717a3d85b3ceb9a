#include "tweezer/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "tweezer/errors.hpp"
#include "tweezer/format.hpp"

namespace tweezer {

void SimplexOptions::validate(std::size_t dimension) const {
    if (initial_step.empty() || (initial_step.size() != 1 && initial_step.size() != dimension))
        throw InputError("initial step must have one entry or one per coordinate");
    for (double s : initial_step)
        if (!(s != 0.0) || !std::isfinite(s)) throw InputError("initial steps must be finite and non-zero");
    if (!(reflection > 0.0)) throw InputError("reflection coefficient must be positive");
    if (!(expansion > 1.0) || !(expansion > reflection)) throw InputError("expansion must exceed 1 and reflection");
    if (!(contraction > 0.0 && contraction < 1.0)) throw InputError("contraction must be in (0, 1)");
    if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("shrink must be in (0, 1)");
    if (max_evaluations < dimension + 1) throw InputError("max evaluations must be at least dimension + 1");
    if (!(f_tolerance >= 0.0) || !(x_tolerance >= 0.0)) throw InputError("tolerances must be non-negative");
}

namespace {

using Point = std::vector<double>;

class Evaluator {
public:
    Evaluator(const Objective& objective, std::size_t budget, bool record)
        : objective_(objective), budget_(budget), record_(record) {}

    double operator()(const Point& x) {
        double f = objective_(x);
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        ++count_;
        if (f < best_value_) {
            best_value_ = f;
            best_ = x;
        }
        if (record_) history_.push_back(best_value_);
        return f;
    }

    bool exhausted() const noexcept { return count_ >= budget_; }
    std::size_t remaining() const noexcept { return budget_ - std::min(budget_, count_); }
    std::size_t count() const noexcept { return count_; }
    double best_value() const noexcept { return best_value_; }
    const Point& best() const noexcept { return best_; }
    std::vector<double>& history() noexcept { return history_; }

private:
    const Objective& objective_;
    std::size_t budget_;
    bool record_;
    std::size_t count_ = 0;
    double best_value_ = std::numeric_limits<double>::infinity();
    Point best_;
    std::vector<double> history_;
};

struct Vertex {
    Point x;
    double f;
};

// Stable ordering keeps the earlier vertex first on ties.
void order(std::vector<Vertex>& simplex) {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
}

bool converged(const std::vector<Vertex>& simplex, const SimplexOptions& opt) {
    const double spread = simplex.back().f - simplex.front().f;
    if (std::isfinite(spread) && spread <= opt.f_tolerance) return true;
    double size = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        for (std::size_t j = 0; j < simplex[i].x.size(); ++j)
            size = std::max(size, std::abs(simplex[i].x[j] - simplex[0].x[j]));
    return size <= opt.x_tolerance;
}

Point combine(const Point& a, const Point& b, double weight) {
    // a + weight (b - a)
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + weight * (b[i] - a[i]);
    return out;
}

// One descent from a fresh axis-aligned simplex. Returns true on convergence.
bool descend(Evaluator& eval, const Point& start, double start_value, const SimplexOptions& opt) {
    const std::size_t n = start.size();
    std::vector<Vertex> simplex;
    simplex.push_back({start, start_value});
    for (std::size_t i = 0; i < n && !eval.exhausted(); ++i) {
        Point x = start;
        x[i] += opt.initial_step.size() == 1 ? opt.initial_step[0] : opt.initial_step[i];
        const double f = eval(x);
        simplex.push_back({std::move(x), f});
    }
    if (simplex.size() < n + 1) return false;
    order(simplex);

    while (!eval.exhausted()) {
        if (converged(simplex, opt)) return true;
        Point centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(n);

        Vertex& worst = simplex[n];
        const double f_best = simplex[0].f;
        const double f_second = simplex[n - 1].f;

        Point xr = combine(centroid, worst.x, -opt.reflection);
        const double fr = eval(xr);
        if (fr < f_best) {
            if (eval.exhausted()) {
                worst = {std::move(xr), fr};
            } else {
                Point xe = combine(centroid, xr, opt.expansion);
                const double fe = eval(xe);
                if (fe < fr)
                    worst = {std::move(xe), fe};
                else
                    worst = {std::move(xr), fr};
            }
        } else if (fr < f_second) {
            worst = {std::move(xr), fr};
        } else {
            bool accepted = false;
            if (!eval.exhausted()) {
                if (fr < worst.f) {
                    Point xc = combine(centroid, xr, opt.contraction);
                    const double fc = eval(xc);
                    if (fc <= fr) {
                        worst = {std::move(xc), fc};
                        accepted = true;
                    }
                } else {
                    Point xc = combine(centroid, worst.x, opt.contraction);
                    const double fc = eval(xc);
                    if (fc < worst.f) {
                        worst = {std::move(xc), fc};
                        accepted = true;
                    }
                }
            }
            if (!accepted) {
                for (std::size_t i = 1; i <= n && !eval.exhausted(); ++i) {
                    simplex[i].x = combine(simplex[0].x, simplex[i].x, opt.shrink);
                    simplex[i].f = eval(simplex[i].x);
                }
            }
        }
        order(simplex);
    }
    return converged(simplex, opt);
}

}  // namespace

OptimizationResult nelder_mead(const Objective& objective, std::span<const double> x0,
                               const SimplexOptions& options) {
    OptimizationResult result;
    const Point start(x0.begin(), x0.end());
    if (start.empty()) {
        const double f = objective(start);
        if (!std::isfinite(f)) throw InputError("objective is not finite at the starting point");
        result.best_value = f;
        result.evaluations = 1;
        result.converged = true;
        if (options.record_history) result.history.push_back(f);
        return result;
    }
    options.validate(start.size());

    Evaluator eval(objective, options.max_evaluations, options.record_history);
    const double f0 = eval(start);
    if (!std::isfinite(f0)) throw InputError("objective is not finite at the starting point");

    bool ok = descend(eval, start, f0, options);
    for (std::size_t r = 0; r < options.restarts && !eval.exhausted(); ++r) {
        const double before = eval.best_value();
        const Point incumbent = eval.best();
        ok = descend(eval, incumbent, before, options);
        if (ok && !(eval.best_value() < before)) break;
    }

    result.best = eval.best();
    result.best_value = eval.best_value();
    result.evaluations = eval.count();
    result.converged = ok;
    result.history = std::move(eval.history());
    return result;
}

bool verification_agrees(double coarse, double refined, double tolerance) {
    const double scale = std::max(std::abs(coarse), std::abs(refined));
    if (scale == 0.0) return true;
    return std::abs(coarse - refined) <= tolerance * scale;
}

SimplexOptions transport_simplex_defaults(std::size_t harmonics) {
    SimplexOptions o;
    o.initial_step = {0.02};
    o.max_evaluations = std::max<std::size_t>(1500, 300 * harmonics);
    return o;
}

TransportOptimization optimize_transport(const TransportSetup& setup, std::size_t harmonics,
                                         const SimplexOptions& options, bool verify,
                                         std::span<const double> start) {
    if (harmonics > max_harmonics) throw DomainError("at most 32 harmonics are supported");
    TransportOptimization out;
    std::vector<double> x0(harmonics, 0.0);
    std::copy_n(start.begin(), std::min(start.size(), harmonics), x0.begin());
    out.baseline = setup.excitation({});
    Objective objective = [&](std::span<const double> c) {
        try {
            return setup.excitation(c);
        } catch (const DomainOverflowError&) {
            // a candidate that throws the atom out of the window is simply bad
            return std::numeric_limits<double>::infinity();
        }
    };
    out.result = nelder_mead(objective, x0, options);
    if (harmonics == 0) out.result.best_value = out.baseline;
    out.verification.objective = out.result.best_value;
    if (verify) {
        const TransportSetup refined = setup.with_resolution(setup.resolution().doubled());
        out.verification.refined_objective = refined.excitation(out.result.best);
        out.verification.agrees =
            verification_agrees(out.verification.objective, out.verification.refined_objective);
    }
    return out;
}

SimplexOptions bandmap_simplex_defaults(std::size_t harmonics) {
    SimplexOptions o;
    o.initial_step.assign(2 * harmonics, 0.02);
    for (std::size_t k = 0; k < harmonics; ++k) o.initial_step[k] = 10.0;
    o.max_evaluations = std::max<std::size_t>(3000, 150 * harmonics);
    return o;
}

std::vector<double> repack_harmonics(std::span<const double> packed, std::size_t harmonics) {
    if (packed.size() % 2 != 0) throw InputError("packed band map coefficients must have even length");
    const std::size_t k = packed.size() / 2;
    const std::size_t keep = std::min(k, harmonics);
    std::vector<double> out(2 * harmonics, 0.0);
    std::copy_n(packed.begin(), keep, out.begin());
    std::copy_n(packed.begin() + static_cast<std::ptrdiff_t>(k), keep,
                out.begin() + static_cast<std::ptrdiff_t>(harmonics));
    return out;
}

namespace {

Objective bandmap_objective(const BandMapSetup& setup) {
    return [&setup](std::span<const double> packed) {
        BandMapOutcome o;
        try {
            o = setup.run_packed(packed);
        } catch (const DomainOverflowError&) {
            return std::numeric_limits<double>::infinity();
        }
        if (o.clamp_violation > 0.0) return 1.0 + o.clamp_violation;
        return o.infidelity;
    };
}

void finish_bandmap(const BandMapSetup& setup, BandMapOptimization& out, bool verify) {
    out.optimum = setup.run_packed(out.result.best);
    out.result.penalized = out.optimum.clamp_violation > 0.0;
    out.verification.objective = out.optimum.infidelity;
    if (verify) {
        const BandMapSetup refined = setup.with_resolution(setup.resolution().doubled());
        out.verification.refined_objective = refined.run_packed(out.result.best).infidelity;
        out.verification.agrees =
            verification_agrees(out.verification.objective, out.verification.refined_objective);
    }
}

}  // namespace

BandMapOptimization optimize_bandmap(const BandMapSetup& setup, const SimplexOptions& options, bool verify,
                                     std::span<const double> start) {
    const std::size_t k = setup.spec().harmonics;
    BandMapOptimization out;
    out.baseline = setup.run({}, {});
    const std::vector<double> x0 = repack_harmonics(start, k);
    out.result = nelder_mead(bandmap_objective(setup), x0, options);
    finish_bandmap(setup, out, verify);
    return out;
}

void BandMapStages::validate(std::size_t full_harmonics) const {
    std::size_t previous = 0;
    for (std::size_t k : harmonics) {
        if (k <= previous) throw InputError("band map stages must increase");
        previous = k;
    }
    if (previous >= full_harmonics) throw InputError("band map stages must stay below the full harmonic count");
    if (evaluations_per_coefficient == 0) throw InputError("stage budget must be positive");
}

BandMapOptimization optimize_bandmap_staged(const BandMapSetup& setup, const BandMapStages& stages, bool verify,
                                            std::span<const double> start) {
    const std::size_t full = setup.spec().harmonics;
    stages.validate(full);
    std::vector<std::size_t> schedule;
    const std::size_t start_k = start.size() / 2;
    for (std::size_t k : stages.harmonics)
        if (k > start_k) schedule.push_back(k);
    schedule.push_back(full);

    BandMapOptimization out;
    out.baseline = setup.run({}, {});
    const Objective objective = bandmap_objective(setup);
    std::vector<double> best(start.begin(), start.end());
    std::size_t used = 0;
    for (std::size_t k : schedule) {
        SimplexOptions opts = bandmap_simplex_defaults(k);
        opts.max_evaluations = stages.evaluations_per_coefficient * 2 * k;
        if (stages.max_evaluations > 0) {
            if (used >= stages.max_evaluations) break;
            opts.max_evaluations = std::min(opts.max_evaluations, stages.max_evaluations - used);
            if (opts.max_evaluations < 2 * k + 1) break;
        }
        const std::vector<double> x0 = repack_harmonics(best, k);
        OptimizationResult r = nelder_mead(objective, x0, opts);
        used += r.evaluations;
        best = r.best;
        out.result.history.insert(out.result.history.end(), r.history.begin(), r.history.end());
        out.result.best_value = r.best_value;
        out.result.converged = r.converged;
    }
    out.result.best = repack_harmonics(best, full);
    out.result.evaluations = used;
    if (used == 0) {
        out.result.best_value = objective(out.result.best);
        out.result.evaluations = 1;
    }
    finish_bandmap(setup, out, verify);
    return out;
}

void write_coefficients(const std::string& path, const std::map<std::string, std::string>& metadata,
                        std::span<const double> coefficients) {
    std::ofstream file(path);
    if (!file) throw InputError("cannot write " + path);
    for (const auto& [key, value] : metadata) file << key << " = " << value << '\n';
    file << "count = " << coefficients.size() << '\n';
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        file << "c" << (i + 1) << " = " << format_double(coefficients[i]) << '\n';
    if (!file) throw InputError("failed writing " + path);
}

std::vector<double> read_coefficients(const std::string& path, std::map<std::string, std::string>* metadata) {
    std::ifstream file(path);
    if (!file) throw InputError("cannot read " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(file, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("malformed line in " + path + ": " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto count_it = entries.find("count");
    if (count_it == entries.end()) throw InputError(path + " has no count entry");
    const std::size_t count = std::stoul(count_it->second);
    std::vector<double> coefficients(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto it = entries.find("c" + std::to_string(i + 1));
        if (it == entries.end()) throw InputError(path + " is missing c" + std::to_string(i + 1));
        coefficients[i] = std::stod(it->second);
        entries.erase(it);
    }
    entries.erase("count");
    if (metadata) *metadata = std::move(entries);
    return coefficients;
}

}  // namespace tweezer
