#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tweezer/protocols.hpp"

namespace tweezer {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
    std::vector<double> initial_step;  // per coordinate; a single entry is broadcast
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double f_tolerance = 1e-12;  // spread of objective values over the simplex
    double x_tolerance = 1e-8;   // largest vertex distance from the best vertex
    std::size_t max_evaluations = 4000;
    std::size_t restarts = 3;
    bool record_history = true;

    void validate(std::size_t dimension) const;
};

struct OptimizationResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
    bool penalized = false;         // set by callers whose objective penalizes
    std::vector<double> history;    // best-so-far after each evaluation
};

// Nelder-Mead downhill simplex. Ties are broken towards the lower vertex
// index, so runs are deterministic. After convergence the simplex is re-seeded
// around the incumbent `restarts` times. A non-finite objective at x0 throws
// InputError; later non-finite values count as +infinity.
OptimizationResult nelder_mead(const Objective& objective, std::span<const double> x0,
                               const SimplexOptions& options);

struct Verification {
    double objective = 0.0;          // value of the optimum at the default resolution
    double refined_objective = 0.0;  // same coefficients at doubled resolution
    bool agrees = false;             // within 50 % of each other
};

bool verification_agrees(double coarse, double refined, double tolerance = 0.5);

struct TransportOptimization {
    OptimizationResult result;
    double baseline = 0.0;  // excitation with zero coefficients
    Verification verification;
};

// Optimizes K position harmonics of a single-site transport against the
// excitation probability, from `start` (zero-padded or truncated to K; zeros
// when empty).
TransportOptimization optimize_transport(const TransportSetup& setup, std::size_t harmonics,
                                         const SimplexOptions& options, bool verify = true,
                                         std::span<const double> start = {});

SimplexOptions transport_simplex_defaults(std::size_t harmonics);

struct BandMapOptimization {
    OptimizationResult result;     // coefficients: depth harmonics then position harmonics
    BandMapOutcome baseline;       // zero coefficients
    BandMapOutcome optimum;
    Verification verification;
};

// Optimizes K depth and K position harmonics of the band-mapping ramp against
// 1 - F_transported F_stationary. Clamped ramps are penalized with 1 + violation.
// `start` is packed like the result but may hold fewer harmonics per half;
// missing ones are zero.
BandMapOptimization optimize_bandmap(const BandMapSetup& setup, const SimplexOptions& options,
                                     bool verify = true, std::span<const double> start = {});

SimplexOptions bandmap_simplex_defaults(std::size_t harmonics);

// Coarse-to-fine schedule: each stage optimizes the lowest k harmonics of both
// ramps from the previous stage's optimum, and a last stage runs at the spec's
// full harmonic count.
struct BandMapStages {
    std::vector<std::size_t> harmonics{1, 2, 4, 8};  // increasing, below the spec's count
    std::size_t evaluations_per_coefficient = 300;   // stage budget = this * 2k
    std::size_t max_evaluations = 12000;             // overall cap, 0: none

    void validate(std::size_t full_harmonics) const;
};

// Evaluation counts and history cover all stages.
BandMapOptimization optimize_bandmap_staged(const BandMapSetup& setup, const BandMapStages& stages,
                                            bool verify = true, std::span<const double> start = {});

// Packed 2k coefficients re-packed for `harmonics` per half (zero-padded or truncated).
std::vector<double> repack_harmonics(std::span<const double> packed, std::size_t harmonics);

// key = value persistence of coefficients and metadata.
void write_coefficients(const std::string& path, const std::map<std::string, std::string>& metadata,
                        std::span<const double> coefficients);
std::vector<double> read_coefficients(const std::string& path,
                                      std::map<std::string, std::string>* metadata = nullptr);

}  // namespace tweezer
