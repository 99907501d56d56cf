#include "parabolica/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "parabolica/errors.hpp"

namespace parabolica {
namespace {

const double kLogR = std::log(kRayEscapeRadius);
const double kLog2LogR = std::log2(kLogR);
// Level at which a single iteration already exceeds the escape radius; rays
// start here from c = e^G e^{2 pi i theta}.
constexpr double kOuterLevel = -4.0;
// A traced point passes the angle check when arg z_j agrees with
// 2^{j-1} theta to kAngleTolerance turns at every depth j where
// |z_j|^2 >= kAngleCheckRatio * max(|c|, 1); there the truncation error of
// arg z_j, about |c| / (2 |z_j|^2) radians, is well below the tolerance.
constexpr double kAngleCheckRatio = 512.0;
const double kAngleTolerance = std::ldexp(1.0, -10);

int depth_for_level(double level) {
    return std::max(1, static_cast<int>(std::ceil(level + kLog2LogR + 1.0 - 1e-12)));
}

double turns_of(Complex z) {
    double t = std::arg(z) / kTwoPi;
    if (t < 0.0) {
        t += 1.0;
    }
    return t >= 1.0 ? 0.0 : t;
}

double circular_gap(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

struct LevelEval {
    bool ok = false;
    Complex residual{};  // log(z_k / W) - log|W|
    Complex dlog{};      // z_k' / z_k
    double log_abs = 0.0;

    // Local distance to M, used as the natural length scale for step control.
    double scale() const { return log_abs / (2.0 * std::abs(dlog)); }
};

// The equation solved on a ray: z_k(c) = exp(2^{k-1-level}) e^{2 pi i angle}.
LevelEval evaluate(Complex c, double level, double angle) {
    const int k = depth_for_level(level);
    Complex z{};
    Complex dz{};
    for (int i = 0; i < k; ++i) {
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
        if (!(norm2(z) < 1e300)) {
            return {};
        }
    }
    if (z == Complex{}) {
        return {};
    }
    LevelEval e;
    e.log_abs = std::log(std::abs(z));
    e.dlog = dz / z;
    e.residual = std::log(z / std::polar(1.0, kTwoPi * angle)) - std::exp2(k - 1 - level);
    e.ok = is_finite(e.residual) && is_finite(e.dlog) && e.dlog != Complex{};
    return e;
}

double target_angle(const Angle& theta, double level) {
    return theta.doubled(static_cast<std::uint64_t>(depth_for_level(level) - 1));
}

// Newton on the level equation. Rounding keeps |F| from reaching tiny values
// deep in the ray, so a few iterations at a modest residual also count.
bool newton_on_level(Complex& c, double level, double angle, int* iterations = nullptr) {
    for (int it = 0; it < 16; ++it) {
        const LevelEval e = evaluate(c, level, angle);
        if (!e.ok) {
            return false;
        }
        const double r = std::abs(e.residual);
        // What rounding of c alone can produce in the residual.
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(c) * std::abs(e.dlog);
        c -= e.residual / e.dlog;
        if (!is_finite(c)) {
            return false;
        }
        if (r < 1e-9 + floor || (it >= 3 && r < 1e-4 + floor)) {
            if (iterations != nullptr) {
                *iterations = it + 1;
            }
            return true;
        }
    }
    return false;
}

// The doubled angles measurable from the orbit of c agree with theta.
bool angle_check(Complex c, const Angle& theta, double level) {
    const int k = depth_for_level(level);
    const double floor2 = kAngleCheckRatio * std::max(std::abs(c), 1.0);
    Complex z{};
    for (int j = 1; j <= k; ++j) {
        z = z * z + c;
        if (norm2(z) >= floor2 &&
            circular_gap(turns_of(z), theta.doubled(static_cast<std::uint64_t>(j - 1))) > kAngleTolerance) {
            return false;
        }
    }
    return true;
}

// Move a ray point from `from` to `to` in level, splitting the step when
// Newton fails, the point jumps more than 3 tangent steps, or the angle
// check fails.
void advance(Complex& c, const Angle& theta, double from, double to, int splits_left) {
    const LevelEval e0 = evaluate(c, from, target_angle(theta, from));
    const double tangent = e0.ok ? std::log(2.0) * e0.log_abs * std::fabs(to - from) / std::abs(e0.dlog) : 0.0;
    Complex trial = c;
    const double angle = target_angle(theta, to);
    if (e0.ok && newton_on_level(trial, to, angle) && std::abs(trial - c) <= 3.0 * tangent + 1e-15 &&
        angle_check(trial, theta, to)) {
        c = trial;
        return;
    }
    if (splits_left == 0) {
        throw NumericalError(Failure::NewtonLost, "trace_ray",
                             "lost the ray near level " + std::to_string(to));
    }
    const double mid = 0.5 * (from + to);
    advance(c, theta, from, mid, splits_left - 1);
    advance(c, theta, mid, to, splits_left - 1);
}

Complex outer_start(const Angle& theta) {
    Complex c = std::polar(std::exp(std::exp2(-kOuterLevel)), kTwoPi * theta.turns());
    if (!newton_on_level(c, kOuterLevel, target_angle(theta, kOuterLevel))) {
        throw NumericalError(Failure::NonConvergence, "trace_ray", "could not start the ray");
    }
    return c;
}

// Adaptive continuation along a ray toward a landing point c0. Predicts in
// u = 1/(c - c0), which is close to linear in the level near a parabolic
// landing point, and lets the level step grow while the predictor is good.
class RayWalker {
public:
    RayWalker(const Angle& theta, Complex c0) : theta_(theta), c0_(c0), c_(outer_start(theta)) {}

    Complex point() const { return c_; }
    double level() const { return level_; }

    /// Advance by one accepted step.
    void step() {
        constexpr double kMinStep = 0.125;
        while (true) {
            const double next = level_ + h_;
            Complex pred;
            bool extrapolated = false;
            const LevelEval here = evaluate(c_, level_, target_angle(theta_, level_));
            if (!here.ok) {
                throw NumericalError(Failure::NewtonLost, "approach_sequence", "ray point stopped escaping");
            }
            if (levels_.size() >= 3) {
                const std::size_t m = levels_.size();
                const double x0 = levels_[m - 3], x1 = levels_[m - 2], x2 = levels_[m - 1];
                const Complex u0 = us_[m - 3], u1 = us_[m - 2], u2 = us_[m - 1];
                const Complex uq = u0 * ((next - x1) * (next - x2) / ((x0 - x1) * (x0 - x2))) +
                                   u1 * ((next - x0) * (next - x2) / ((x1 - x0) * (x1 - x2))) +
                                   u2 * ((next - x0) * (next - x1) / ((x2 - x0) * (x2 - x1)));
                const Complex ul = u1 + (u2 - u1) * ((next - x1) / (x2 - x1));
                pred = c0_ + 1.0 / uq;
                if (std::abs(pred - (c0_ + 1.0 / ul)) > 0.05 * here.scale() && h_ > kMinStep) {
                    h_ *= 0.5;
                    continue;
                }
                extrapolated = true;
            } else {
                pred = c_;
            }
            Complex cn = pred;
            int its = 0;
            const bool ok = newton_on_level(cn, next, target_angle(theta_, next), &its);
            const LevelEval there = ok ? evaluate(cn, next, target_angle(theta_, next)) : LevelEval{};
            const bool close = there.ok && std::abs(cn - pred) <= (extrapolated ? 0.1 * there.scale()
                                                                                 : 3.0 * h_ * std::abs(there.log_abs / there.dlog) + 1e-15);
            if (!ok || !close || !angle_check(cn, theta_, next)) {
                if (h_ <= kMinStep) {
                    // Last resort: fixed substeps with splitting.
                    Complex c = c_;
                    advance(c, theta_, level_, next, 6);
                    accept(c, next);
                    return;
                }
                h_ *= 0.5;
                continue;
            }
            accept(cn, next);
            if (extrapolated && its <= 3 && std::abs(cn - pred) < 0.01 * there.scale()) {
                h_ *= 2.0;
            }
            return;
        }
    }

    /// Ray point at `level`, solved from an interpolated seed between the
    /// last two accepted points; does not move the walker.
    bool solve_between(double level, Complex& out) const {
        Complex seed = c_;
        if (level_ > prev_level_) {
            const Complex u0 = 1.0 / (prev_c_ - c0_);
            const Complex u1 = 1.0 / (c_ - c0_);
            seed = c0_ + 1.0 / (u0 + (u1 - u0) * ((level - prev_level_) / (level_ - prev_level_)));
        }
        out = seed;
        return newton_on_level(out, level, target_angle(theta_, level)) && angle_check(out, theta_, level);
    }

    double previous_level() const { return prev_level_; }
    Complex previous_point() const { return prev_c_; }

private:
    void accept(Complex c, double level) {
        prev_c_ = c_;
        prev_level_ = level_;
        c_ = c;
        level_ = level;
        levels_.push_back(level);
        us_.push_back(1.0 / (c - c0_));
    }

    Angle theta_;
    Complex c0_;
    Complex c_;
    double level_ = kOuterLevel;
    Complex prev_c_ = c_;
    double prev_level_ = kOuterLevel;
    double h_ = 0.125;
    std::vector<double> levels_;
    std::vector<Complex> us_;
};

struct EscapeJet {
    int n = 0;
    Complex z{};
    Complex dz{};
};

EscapeJet escape_with_jet(Complex c, int depth, std::string_view op) {
    if (depth < 1) {
        throw PreconditionError(op, "depth must be positive");
    }
    if (!is_finite(c)) {
        throw PreconditionError(op, "c must be finite");
    }
    const double r2 = kRayEscapeRadius * kRayEscapeRadius;
    Complex z{};
    Complex dz{};
    for (int i = 1; i <= depth; ++i) {
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
        if (norm2(z) > r2) {
            return {i, z, dz};
        }
    }
    throw NumericalError(Failure::InsideOrUndecided, op,
                         "no escape past 1e6 within " + std::to_string(depth) + " iterations");
}

}  // namespace

double RayPoint::potential() const { return std::exp2(log2_potential); }

BoettcherValue boettcher_potential(Complex c, int depth) {
    const EscapeJet e = escape_with_jet(c, depth, "boettcher");
    const double L = std::log(std::abs(e.z));
    BoettcherValue v;
    v.escape_index = e.n;
    v.log2_potential = std::log2(L) + (1 - e.n);
    v.potential = std::ldexp(L, 1 - e.n);
    v.derivative = (e.dz / e.z) * std::ldexp(1.0, 1 - e.n);
    return v;
}

BoettcherValue boettcher(Complex c, int depth) {
    BoettcherValue v = boettcher_potential(c, depth);
    double level = -v.log2_potential;
    int k = depth_for_level(level);
    Complex z{};
    for (int i = 0; i < k; ++i) {
        z = z * z + c;
    }
    double angle = turns_of(z);
    Complex point = c;
    // Walk outward along the ray through c; each time the depth drops by one,
    // one binary digit of the doubled angle is recovered from arg z_{k-1}.
    constexpr double kOutStep = 0.125;
    while (k > 1) {
        double next = std::max(level - kOutStep, kOuterLevel);
        int k_next = depth_for_level(next);
        double a = angle;
        if (k_next < k) {
            Complex w{};
            for (int i = 0; i < k_next; ++i) {
                w = w * w + point;
            }
            const double measured = turns_of(w);
            for (int d = k; d > k_next; --d) {
                a *= 0.5;
            }
            // Candidates (a + j / 2^{k - k_next}); pick the closest to the measurement.
            const int span = 1 << std::min(k - k_next, 20);
            double best = a;
            for (int j = 0; j < span; ++j) {
                const double cand = a + static_cast<double>(j) / span;
                if (circular_gap(cand, measured) < circular_gap(best, measured)) {
                    best = cand;
                }
            }
            a = best - std::floor(best);
        }
        Complex trial = point;
        if (!newton_on_level(trial, next, a)) {
            throw NumericalError(Failure::NewtonLost, "boettcher", "outward trace failed");
        }
        point = trial;
        level = next;
        k = k_next;
        angle = a;
    }
    v.argument = angle;
    return v;
}

RayTrace trace_ray(const Angle& theta, double pot_start, double pot_end, int steps_per_halving) {
    if (!(pot_start > pot_end) || !(pot_end > 0.0) || !std::isfinite(pot_start)) {
        throw PreconditionError("trace_ray", "need pot_start > pot_end > 0");
    }
    if (steps_per_halving < 1) {
        throw PreconditionError("trace_ray", "steps_per_halving must be positive");
    }
    const double l_start = -std::log2(pot_start);
    const double l_end = -std::log2(pot_end);
    const double dl = 1.0 / steps_per_halving;

    double level = std::min(kOuterLevel, l_start);
    Complex c = std::polar(std::exp(std::exp2(-level)), kTwoPi * theta.turns());
    if (!newton_on_level(c, level, target_angle(theta, level))) {
        throw NumericalError(Failure::NonConvergence, "trace_ray", "could not start the ray");
    }
    while (level < l_start) {
        const double next = std::min(level + dl, l_start);
        advance(c, theta, level, next, 8);
        level = next;
    }

    RayTrace trace;
    trace.theta = theta;
    trace.points.push_back({c, theta, -level});
    const auto steps = static_cast<long>(std::ceil((l_end - l_start) / dl - 1e-9));
    for (long i = 1; i <= steps; ++i) {
        const double next = std::min(l_start + static_cast<double>(i) * dl, l_end);
        advance(c, theta, level, next, 8);
        level = next;
        trace.points.push_back({c, theta, -level});
    }
    trace.landing_estimate = trace.points.back().c;
    return trace;
}

std::vector<Complex> approach_sequence(const BifurcationSite& site, const Angle& theta, int count, int first) {
    if (count < 0 || first < 1) {
        throw PreconditionError("approach_sequence", "need count >= 0 and first >= 1");
    }
    std::vector<Complex> out;
    if (count == 0) {
        return out;
    }
    const double rel_tol = 2e-4;
    RayWalker walker(theta, site.c0);
    int k = first;
    const auto target = [&](int idx) { return 0.1 * std::exp2(-0.5 * idx); };
    while (static_cast<int>(out.size()) < count) {
        const double d = target(k);
        if (std::abs(walker.point() - site.c0) > d) {
            walker.step();
            continue;
        }
        // The target distance lies within the last step; regula falsi in the
        // level on the log distance. Several targets may share one step.
        double la = walker.previous_level();
        double lb = walker.level();
        double fa = std::log(std::abs(walker.previous_point() - site.c0) / d);
        double fb = std::log(std::abs(walker.point() - site.c0) / d);
        Complex best = walker.point();
        double best_err = std::fabs(fb);
        for (int it = 0; it < 60 && best_err > rel_tol && fa > 0.0; ++it) {
            const double lm = la - fa * (lb - la) / (fb - fa);
            const double lt = std::clamp(lm, la + 0.02 * (lb - la), lb - 0.02 * (lb - la));
            Complex cm;
            if (!walker.solve_between(lt, cm)) {
                break;
            }
            const double fm = std::log(std::abs(cm - site.c0) / d);
            if (std::fabs(fm) < best_err) {
                best_err = std::fabs(fm);
                best = cm;
            }
            if (fm > 0.0) {
                la = lt;
                fa = fm;
            } else {
                lb = lt;
                fb = fm;
            }
        }
        if (best_err > 1e-3) {
            throw NumericalError(Failure::NonConvergence, "approach_sequence",
                                 "could not place a ray point at distance " + std::to_string(d));
        }
        out.push_back(best);
        ++k;
    }
    return out;
}

double exterior_distance(Complex c, int depth) {
    const EscapeJet e = escape_with_jet(c, depth, "exterior_distance");
    const double L = std::log(std::abs(e.z));
    const double G = std::ldexp(L, 1 - e.n);
    const double shape = G > 0.0 ? -std::expm1(-2.0 * G) / (2.0 * G) : 1.0;
    return shape * L / (2.0 * std::abs(e.dz / e.z));
}

std::string format_pow2(double log2_value, int digits) {
    const double x = log2_value * std::log10(2.0);
    double e = std::floor(x);
    double m = std::pow(10.0, x - e);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits - 1, m);
    if (buf[0] == '1' && buf[1] == '0') {  // rounding carried to 10.0
        e += 1.0;
        m /= 10.0;
        std::snprintf(buf, sizeof buf, "%.*f", digits - 1, m);
    }
    char out[96];
    std::snprintf(out, sizeof out, "%se%+d", buf, static_cast<int>(e));
    return out;
}

void write_ray_csv(std::ostream& os, const RayTrace& trace) {
    os << "theta_num,theta_den,potential,re,im\n";
    char buf[96];
    for (const RayPoint& p : trace.points) {
        os << p.theta.num() << ',' << p.theta.den() << ',' << format_pow2(p.log2_potential) << ',';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.c.real(), p.c.imag());
        os << buf;
    }
}

}  // namespace parabolica
