#pragma once

// Escape-time experiments at parabolic parameters: circle minima, ray
// approaches, the primitive case, stability off the ray and transit times.

#include <cstdint>
#include <string>
#include <vector>

#include "parabolica/dynamics.hpp"
#include "parabolica/parabolic.hpp"
#include "parabolica/types.hpp"

namespace parabolica {

inline constexpr int kDefaultCircleSamples = 16384;

struct ExperimentRecord {
    Complex site_c0{};
    int qn = 0;
    double alpha_abs = 0.0;
    std::uint64_t N = 0;
    double scaled = 0.0;    ///< N |alpha| tau, or N |alpha|^{1/2} tau at a primitive site
    double residual = 0.0;  ///< pi / (|alpha| tau) - N, with |alpha|^{1/2} at a primitive site
    /// Empty on success; otherwise the failure that replaced this cell.
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Record for an escape time N at distance alpha_abs from the site.
ExperimentRecord make_record(const BifurcationSite& site, double alpha_abs, std::uint64_t N);

struct CircleOptions {
    int samples = kDefaultCircleSamples;
    double R = kDefaultEscapeRadius;
    std::uint64_t cap = 0;  ///< 0 picks 20 pi / (|alpha| tau)
    std::size_t threads = 0;
    /// Also scan the narrow windows around the two ray directions, where the
    /// minimum lives; uniform samples alone miss it once |alpha| is small.
    bool refine_gaps = true;
};

/// Minimum escape time over escaping points of the circle |c - c0| = alpha_abs.
/// Throws AllInterior if no sample escapes.
ExperimentRecord circle_min_escape(const BifurcationSite& site, double alpha_abs, const CircleOptions& opts = {});

struct RunOptions {
    double R = kDefaultEscapeRadius;
    std::uint64_t cap = kDefaultIterationCap;
    std::size_t threads = 0;
};

/// Escape times along the ray of angle theta at the approach distances
/// 0.1 * 2^{-k/2}, k = first .. first + count - 1.
std::vector<ExperimentRecord> ray_pi_experiment(const BifurcationSite& site, const Angle& theta, int count,
                                                const RunOptions& opts = {}, int first = 1);

/// Escape times at c0 + 10^{-2k} d, k = 1..count, with d the unit direction of
/// the ray landing at the primitive root (the positive reals for 1/4).
std::vector<ExperimentRecord> primitive_pi_experiment(const BifurcationSite& site, int count,
                                                      const RunOptions& opts = {});

struct StabilityRecord {
    int t_index = 0;
    Complex c_on_ray{};
    std::uint64_t N_ray = 0;
    int samples = 0;
    std::uint64_t max_dev = 0;
    double disk_radius = 0.0;
};

/// Escape-time spread over seeded uniform samples in the disk of radius
/// exterior_distance(c_k) / a about each ray point c_k.
std::vector<StabilityRecord> off_ray_stability(const BifurcationSite& site, const Angle& theta, int count,
                                                 double a, int samples, std::uint64_t seed,
                                                 const RunOptions& opts = {}, int first = 1);

struct TransitRow {
    double alpha_abs = 0.0;
    std::uint64_t N = 0;
    double predicted = 0.0;  ///< |lifted_phase_prediction|
    double D = 0.0;          ///< |N / qn - predicted|
};

struct TransitReport {
    std::vector<TransitRow> rows;
    double max_D = 0.0;
    double slope = 0.0;  ///< least-squares slope of D against 1 / |alpha|
};

/// Satellite sites only.
TransitReport transit_diagnostic(const BifurcationSite& site, const Angle& theta, int count,
                                 const RunOptions& opts = {}, int first = 1);

/// The four parabolic parameters of the reference table, in table order.
std::vector<BifurcationSite> reference_sites();

/// circle_min_escape over sites x alphas; a failing cell is recorded with its
/// error and the run continues.
std::vector<ExperimentRecord> reference_table(const std::vector<BifurcationSite>& sites,
                                            const std::vector<double>& alphas, const CircleOptions& opts = {});

}  // namespace parabolica
