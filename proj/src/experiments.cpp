#include "parabolica/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>

#include "parabolica/errors.hpp"
#include "parabolica/parallel.hpp"
#include "parabolica/rays.hpp"

namespace parabolica {
namespace {

double distance_factor(const BifurcationSite& site, double alpha_abs) {
    return site.primitive() ? std::sqrt(alpha_abs) : alpha_abs;
}

// Minimum escape time over c0 + alpha_abs e^{i phi}, phi in `angles`, never
// iterating past `best` (a point cannot lower the minimum once it is there).
void scan_angles(const BifurcationSite& site, double alpha_abs, const std::vector<double>& angles, double R,
                 std::atomic<std::uint64_t>& best, std::size_t threads, std::atomic<bool>& any) {
    constexpr std::size_t kChunk = 64;
    const std::size_t chunks = (angles.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, 1, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kChunk;
        const std::size_t len = std::min(kChunk, angles.size() - begin);
        std::vector<Complex> cs(len);
        std::vector<EscapeOutcome> out(len);
        for (std::size_t i = 0; i < len; ++i) {
            cs[i] = site.c0 + std::polar(alpha_abs, angles[begin + i]);
        }
        escape_time_block(cs, R, best.load(), out);
        for (const EscapeOutcome& o : out) {
            if (!o.escaped) {
                continue;
            }
            any.store(true);
            std::uint64_t cur = best.load();
            while (o.n < cur && !best.compare_exchange_weak(cur, o.n)) {
            }
        }
    });
}

std::vector<double> window(double center, double half_width, double step) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::ceil(half_width / step));
    for (long i = -n; i <= n; ++i) {
        out.push_back(center + static_cast<double>(i) * step);
    }
    return out;
}

std::uint64_t escape_n(Complex c, const RunOptions& opts) {
    return escape_time(c, opts.R, opts.cap).n;
}

std::vector<ExperimentRecord> records_along(const BifurcationSite& site, const std::vector<Complex>& cs,
                                            const RunOptions& opts) {
    std::vector<EscapeOutcome> outs = escape_time_batch(cs, opts.R, opts.cap, opts.threads);
    std::vector<ExperimentRecord> recs;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!outs[i].escaped) {
            throw NumericalError(Failure::InsideOrUndecided, "ray_pi_experiment",
                                 "ray point did not escape within the iteration cap");
        }
        recs.push_back(make_record(site, std::abs(cs[i] - site.c0), outs[i].n));
    }
    return recs;
}

}  // namespace

ExperimentRecord make_record(const BifurcationSite& site, double alpha_abs, std::uint64_t N) {
    ExperimentRecord r;
    r.site_c0 = site.c0;
    r.qn = site.qn();
    r.alpha_abs = alpha_abs;
    r.N = N;
    const double f = distance_factor(site, alpha_abs);
    r.scaled = static_cast<double>(N) * f * site.tau;
    r.residual = kPi / (f * site.tau) - static_cast<double>(N);
    return r;
}

ExperimentRecord circle_min_escape(const BifurcationSite& site, double alpha_abs, const CircleOptions& opts) {
    constexpr std::string_view op = "circle_min_escape";
    if (!(alpha_abs > 0.0) || !std::isfinite(alpha_abs)) {
        throw PreconditionError(op, "alpha_abs must be positive");
    }
    if (opts.samples < 1024) {
        throw PreconditionError(op, "at least 1024 samples are required");
    }
    if (!(site.tau > 0.0)) {
        throw PreconditionError(op, "site has no tau");
    }
    const double min_cap = 20.0 * kPi / (distance_factor(site, alpha_abs) * site.tau);
    std::uint64_t cap = opts.cap;
    if (cap == 0) {
        cap = static_cast<std::uint64_t>(std::ceil(min_cap));
    } else if (static_cast<double>(cap) < min_cap) {
        throw PreconditionError(op, "cap must be at least 20 pi / (|alpha| tau)");
    }
    if (!(opts.R >= 2.0)) {
        throw PreconditionError(op, "R must be at least 2");
    }

    std::atomic<std::uint64_t> best{cap};
    std::atomic<bool> any{false};
    if (opts.refine_gaps && site.dmu_qn != Complex{}) {
        // The low escape times sit in the channel between the two components
        // touching at c0, a window of angular width ~ |alpha dmu| about each
        // ray direction. A coarse pass locates it, a fine pass pins the minimum.
        const double spread = alpha_abs * std::max(std::abs(site.dmu_qn), 1.0);
        const double half = std::min(kPi, 8.0 * spread);
        const double step = spread / 64.0;
        for (const Complex& d : ray_directions(site)) {
            const double phi = std::arg(d);
            scan_angles(site, alpha_abs, window(phi, half, step), opts.R, best, opts.threads, any);
        }
    }
    std::vector<double> uniform(static_cast<std::size_t>(opts.samples));
    for (int j = 0; j < opts.samples; ++j) {
        uniform[static_cast<std::size_t>(j)] = kTwoPi * j / opts.samples;
    }
    scan_angles(site, alpha_abs, uniform, opts.R, best, opts.threads, any);
    if (!any.load()) {
        throw NumericalError(Failure::AllInterior, op, "no circle sample escaped within the cap");
    }
    return make_record(site, alpha_abs, best.load());
}

std::vector<ExperimentRecord> ray_pi_experiment(const BifurcationSite& site, const Angle& theta, int count,
                                                const RunOptions& opts, int first) {
    return records_along(site, approach_sequence(site, theta, count, first), opts);
}

std::vector<ExperimentRecord> primitive_pi_experiment(const BifurcationSite& site, int count, const RunOptions& opts) {
    if (!site.primitive()) {
        throw PreconditionError("primitive_pi_experiment", "primitive site required");
    }
    if (count < 0) {
        throw PreconditionError("primitive_pi_experiment", "count must be nonnegative");
    }
    const Complex dir = ray_directions(site).front();
    std::vector<Complex> cs;
    for (int k = 1; k <= count; ++k) {
        cs.push_back(site.c0 + std::pow(10.0, -2.0 * k) * dir);
    }
    return records_along(site, cs, opts);
}

std::vector<StabilityRecord> off_ray_stability(const BifurcationSite& site, const Angle& theta, int count,
                                                 double a, int samples, std::uint64_t seed,
                                                 const RunOptions& opts, int first) {
    constexpr std::string_view op = "off_ray_stability";
    if (!(a > 1.0) || !std::isfinite(a)) {
        throw PreconditionError(op, "a must exceed 1");
    }
    if (samples < 0) {
        throw PreconditionError(op, "samples must be nonnegative");
    }
    const std::vector<Complex> ray = approach_sequence(site, theta, count, first);
    std::mt19937_64 rng(seed);
    // Top 53 bits as a double in [0, 1); avoids library-specific distributions.
    const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    std::vector<StabilityRecord> out;
    for (std::size_t i = 0; i < ray.size(); ++i) {
        StabilityRecord rec;
        rec.t_index = first + static_cast<int>(i);
        rec.c_on_ray = ray[i];
        rec.samples = samples;
        rec.N_ray = escape_n(ray[i], opts);
        const double d = exterior_distance(ray[i], static_cast<int>(std::min<std::uint64_t>(opts.cap, 1u << 30)));
        rec.disk_radius = d / a;
        if (!(rec.disk_radius > 0.0) || !std::isfinite(rec.disk_radius)) {
            throw NumericalError(Failure::DiskDegenerate, op, "exterior distance underflowed");
        }
        std::vector<Complex> cs;
        cs.reserve(static_cast<std::size_t>(samples));
        while (static_cast<int>(cs.size()) < samples) {
            const double x = 2.0 * uniform() - 1.0;
            const double y = 2.0 * uniform() - 1.0;
            if (x * x + y * y <= 1.0) {
                cs.push_back(ray[i] + rec.disk_radius * Complex{x, y});
            }
        }
        for (const EscapeOutcome& o : escape_time_batch(cs, opts.R, opts.cap, opts.threads)) {
            const std::uint64_t dev = o.n > rec.N_ray ? o.n - rec.N_ray : rec.N_ray - o.n;
            rec.max_dev = std::max(rec.max_dev, dev);
        }
        out.push_back(rec);
    }
    return out;
}

TransitReport transit_diagnostic(const BifurcationSite& site, const Angle& theta, int count, const RunOptions& opts,
                                 int first) {
    if (site.primitive()) {
        throw PreconditionError("transit_diagnostic", "satellite site required");
    }
    TransitReport rep;
    const std::vector<Complex> ray = approach_sequence(site, theta, count, first);
    const std::vector<EscapeOutcome> outs = escape_time_batch(ray, opts.R, opts.cap, opts.threads);
    for (std::size_t i = 0; i < ray.size(); ++i) {
        TransitRow row;
        row.alpha_abs = std::abs(ray[i] - site.c0);
        row.N = outs[i].n;
        row.predicted = std::abs(lifted_phase_prediction(site, ray[i] - site.c0));
        row.D = std::fabs(static_cast<double>(row.N) / site.qn() - row.predicted);
        rep.max_D = std::max(rep.max_D, row.D);
        rep.rows.push_back(row);
    }
    if (rep.rows.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (const auto& r : rep.rows) {
            mx += 1.0 / r.alpha_abs;
            my += r.D;
        }
        mx /= static_cast<double>(rep.rows.size());
        my /= static_cast<double>(rep.rows.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto& r : rep.rows) {
            const double dx = 1.0 / r.alpha_abs - mx;
            sxy += dx * (r.D - my);
            sxx += dx * dx;
        }
        rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return rep;
}

std::vector<BifurcationSite> reference_sites() {
    const Complex seed{-1.768529152467788, 0.0};
    return {locate_satellite(1, 1, 4), locate_satellite(2, 1, 3), locate_satellite(3, 1, 2, &seed),
            locate_satellite(1, 1, 3)};
}

std::vector<ExperimentRecord> reference_table(const std::vector<BifurcationSite>& sites,
                                            const std::vector<double>& alphas, const CircleOptions& opts) {
    std::vector<ExperimentRecord> out;
    for (const BifurcationSite& site : sites) {
        for (double a : alphas) {
            try {
                out.push_back(circle_min_escape(site, a, opts));
            } catch (const std::exception& e) {
                ExperimentRecord r;
                r.site_c0 = site.c0;
                r.qn = site.qn();
                r.alpha_abs = a;
                r.error = e.what();
                out.push_back(r);
            }
        }
    }
    return out;
}

}  // namespace parabolica
