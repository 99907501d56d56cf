#include "parabolica/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "parabolica/dynamics.hpp"
#include "parabolica/errors.hpp"

namespace parabolica {
namespace {

constexpr double kSiteResidualTol = 1e-12;
constexpr int kPairNewtonSteps = 100;

void check_rotation(int p, int q, std::string_view op) {
    if (q < 1) {
        throw PreconditionError(op, "q must be positive");
    }
    if (std::gcd(p, q) != 1) {
        throw PreconditionError(op, "p and q must be coprime, got " + std::to_string(p) + "/" + std::to_string(q));
    }
}

void check_period(int n, std::string_view op) {
    if (n < 1 || n > kMaxPeriod) {
        throw PreconditionError(op, "period must lie in [1, 24], got " + std::to_string(n));
    }
}

struct PairSolution {
    Complex c;
    Complex z;
};

// Newton in (c, z) on F = (p_c^m(z) - z, (p_c^m)'(z) - target).
PairSolution solve_pair(int m, Complex target, Complex c, Complex z, std::string_view op) {
    double best = INFINITY;
    PairSolution best_sol{c, z};
    for (int it = 0; it < kPairNewtonSteps; ++it) {
        const OrbitJet2 jet = iterate_jet2(c, z, m);
        const Complex f1 = jet.z - z;
        const Complex f2 = jet.dz_dz0 - target;
        const double res = std::max(std::abs(f1), std::abs(f2));
        if (res < best) {
            best = res;
            best_sol = {c, z};
        }
        if (res < kSiteResidualTol) {
            return {c, z};
        }
        const Complex a = jet.dz_dc;
        const Complex b = jet.dz_dz0 - 1.0;
        const Complex e = jet.d2z_dz0dc;
        const Complex d = jet.d2z_dz0dz0;
        const Complex det = a * d - b * e;
        const double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(e);
        if (!(std::abs(det) > 1e-14 * scale) || !is_finite(det)) {
            throw NumericalError(Failure::JacobianSingular, op, "Jacobian of the (c, z) system is singular");
        }
        const Complex dc = (f1 * d - b * f2) / det;
        const Complex dz = (a * f2 - e * f1) / det;
        c -= dc;
        z -= dz;
        if (!is_finite(c) || !is_finite(z)) {
            break;
        }
        if (std::abs(dc) + std::abs(dz) <= 1e-16 * (1.0 + std::abs(c) + std::abs(z))) {
            break;
        }
    }
    // Rounding can stall just above the tolerance for long orbits; accept a
    // stalled iterate only if it is within a small factor of the target.
    if (best < 4.0 * kSiteResidualTol) {
        return best_sol;
    }
    throw NumericalError(Failure::NonConvergence, op,
                         "Newton in (c, z) stalled at residual " + std::to_string(best));
}

double pair_residual(int m, Complex target, Complex c, Complex z) {
    const OrbitJet jet = iterate_jet(c, z, m);
    return std::max(std::abs(jet.z - z), std::abs(jet.dz_dz0 - target));
}

Complex canonical_point(Complex c, Complex z, int n) {
    Complex best = z;
    for (const Complex& w : orbit_points(c, z, n)) {
        const double nw = std::abs(w);
        const double nb = std::abs(best);
        if (nw < nb || (nw == nb && (w.real() > best.real() || (w.real() == best.real() && w.imag() > best.imag())))) {
            best = w;
        }
    }
    return best;
}

// dmu/dc of the period-m orbit through z at c, by implicit differentiation.
Complex multiplier_derivative(Complex c, Complex z, int m) {
    const OrbitJet2 jet = iterate_jet2(c, z, m);
    const Complex g_z = jet.dz_dz0 - 1.0;
    return jet.d2z_dz0dc - jet.d2z_dz0dz0 * jet.dz_dc / g_z;
}

// Newton on (p^m(z) - z) / (p^n(z) - z): the period-n points are divided
// out, so iterates cannot stall on the nearly degenerate survivor.
Complex deflated_newton(Complex c, int n, int m, Complex z) {
    for (int it = 0; it < kMaxNewtonSteps; ++it) {
        const OrbitJet gm = iterate_jet(c, z, m);
        const OrbitJet gn = iterate_jet(c, z, n);
        const Complex g = gm.z - z;
        const Complex d = gn.z - z;
        const Complex denom = (gm.dz_dz0 - 1.0) * d - g * (gn.dz_dz0 - 1.0);
        if (denom == Complex{}) {
            break;
        }
        const Complex step = g * d / denom;
        z -= step;
        if (!is_finite(z)) {
            break;
        }
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
            return z;
        }
    }
    if (!is_finite(z)) {
        throw NumericalError(Failure::NonConvergence, "split_fixed_points", "deflated Newton diverged");
    }
    return z;
}

// Period-(qn) points at c within reach of z0 that are not of period n.
std::vector<PeriodicOrbit> split_points_near(Complex c, Complex z0, int n, int q, double rho) {
    const int m = q * n;
    std::vector<PeriodicOrbit> found;
    const double radii[] = {1.0, 0.5, 2.0, 0.25, 4.0};
    const int angles = 4 * q;
    for (double f : radii) {
        for (int j = 0; j < angles; ++j) {
            const Complex seed = z0 + std::polar(f * rho, kTwoPi * (j + 0.5) / angles);
            PeriodicOrbit orb;
            try {
                const Complex z = deflated_newton(c, n, m, seed);
                orb = solve_periodic_point(c, m, z);
                if (std::abs(orb.point - z) > 1e-3 * rho) {
                    continue;
                }
            } catch (const NumericalError&) {
                continue;
            }
            if (std::abs(orb.point - z0) > 16.0 * rho) {
                continue;
            }
            const bool dup = std::any_of(found.begin(), found.end(), [&](const PeriodicOrbit& o) {
                return std::abs(o.point - orb.point) < 1e-6 * rho;
            });
            if (!dup) {
                found.push_back(orb);
            }
        }
        if (static_cast<int>(found.size()) >= q) {
            break;
        }
    }
    std::sort(found.begin(), found.end(), [&](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        const auto angle = [&](Complex w) {
            const double t = std::arg(w - z0);
            return t < 0.0 ? t + kTwoPi : t;
        };
        return std::make_pair(std::abs(a.point - z0), angle(a.point)) <
               std::make_pair(std::abs(b.point - z0), angle(b.point));
    });
    if (static_cast<int>(found.size()) > q) {
        found.resize(static_cast<std::size_t>(q));
    }
    std::sort(found.begin(), found.end(), [&](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        const auto angle = [&](Complex w) {
            const double t = std::arg(w - z0);
            return t < 0.0 ? t + kTwoPi : t;
        };
        return angle(a.point) < angle(b.point);
    });
    return found;
}

// Limit of mu'_{qn} along the internal angle-0 ray of the qn-component.
Complex satellite_ray_limit(const BifurcationSite& s, RayLimitOptions opts) {
    const int m = s.qn();
    // First-order estimate of mu'_{qn}(c0) from one small probe off c0.
    const double probe = 1e-6;
    const Complex cp = s.c0 + probe;
    const double rho_p = std::pow(probe, 1.0 / s.q);
    const auto probe_pts = split_points_near(cp, s.z0, s.n, s.q, rho_p);
    if (probe_pts.empty()) {
        throw NumericalError(Failure::NonConvergence, "locate_satellite",
                             "no period-qn point found near the parabolic point");
    }
    const Complex slope = (probe_pts.front().multiplier - 1.0) / probe;

    std::vector<double> hs;
    std::vector<Complex> vals;
    for (int j = opts.first_level; j < opts.first_level + opts.levels; ++j) {
        const double h = std::ldexp(1.0, -j);
        const Complex c_seed = s.c0 - h / slope;
        const double rho = std::pow(std::abs(c_seed - s.c0), 1.0 / s.q);
        const auto pts = split_points_near(c_seed, s.z0, s.n, s.q, rho);
        if (pts.empty()) {
            throw NumericalError(Failure::NonConvergence, "locate_satellite",
                                 "no internal-ray seed at level " + std::to_string(j));
        }
        const PairSolution sol = solve_pair(m, Complex{1.0 - h, 0.0}, c_seed, pts.front().point, "locate_satellite");
        hs.push_back(h);
        vals.push_back(multiplier_derivative(sol.c, sol.z, m));
    }
    return extrapolate_to_zero(hs, vals);
}

// Limit of 2 sqrt(c - c0) mu_n'(c), the derivative of mu_n in the chart
// lambda = sqrt(c - c0), along the internal angle-0 ray.
Complex primitive_ray_limit(const BifurcationSite& s, RayLimitOptions opts) {
    const int m = s.n;
    const OrbitJet2 jet = iterate_jet2(s.c0, s.z0, m);
    const Complex a = 0.5 * jet.d2z_dz0dz0;
    const Complex b = jet.dz_dc;
    const Complex kappa = 2.0 * std::sqrt(-a * b);

    std::vector<double> hs;
    std::vector<Complex> vals;
    for (int j = opts.first_level; j < opts.first_level + opts.levels; ++j) {
        const double h = std::ldexp(1.0, -j);
        const Complex r{1.0 - h, 0.0};
        const Complex dc = (h / kappa) * (h / kappa);
        const Complex w = std::sqrt(-b * dc / a);
        const Complex z_seed = std::abs(1.0 + 2.0 * a * w - r) <= std::abs(1.0 - 2.0 * a * w - r) ? s.z0 + w : s.z0 - w;
        const PairSolution sol = solve_pair(m, r, s.c0 + dc, z_seed, "locate_primitive");
        Complex lam = std::sqrt(sol.c - s.c0);
        if (lam.imag() < 0.0 || (lam.imag() == 0.0 && lam.real() < 0.0)) {
            lam = -lam;
        }
        hs.push_back(h);
        vals.push_back(2.0 * lam * multiplier_derivative(sol.c, sol.z, m));
    }
    return extrapolate_to_zero(hs, vals);
}

BifurcationSite finish_site(BifurcationSite s, Complex seed_c, Complex seed_z, RayLimitOptions opts,
                            std::string_view op) {
    if (opts.levels < 1 || opts.first_level < 2 || opts.first_level + opts.levels > 40) {
        throw PreconditionError(op, "internal-ray levels out of range");
    }
    PairSolution sol = solve_pair(s.n, s.lambda, seed_c, seed_z, op);
    if (!has_exact_period(sol.c, sol.z, s.n)) {
        throw NumericalError(Failure::PeriodNotExact, op, "parabolic orbit has a smaller period");
    }
    const Complex zc = canonical_point(sol.c, sol.z, s.n);
    if (zc != sol.z) {
        sol = solve_pair(s.n, s.lambda, sol.c, zc, op);
    }
    s.c0 = sol.c;
    s.z0 = sol.z;
    if (pair_residual(s.n, s.lambda, s.c0, s.z0) > 1e-10) {
        throw NumericalError(Failure::NonConvergence, op, "site residual above 1e-10");
    }
    s.dmu_qn = s.primitive() ? primitive_ray_limit(s, opts) : satellite_ray_limit(s, opts);
    s.tau = std::abs(s.dmu_qn) / (2.0 * s.qn());
    return s;
}

}  // namespace

Complex root_of_unity(int p, int q) {
    check_rotation(p, q, "root_of_unity");
    const int r = ((p % q) + q) % q;
    if ((4 * r) % q == 0) {
        static constexpr Complex axes[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
        return axes[(4 * r) / q];
    }
    return std::polar(1.0, kTwoPi * r / q);
}

Complex cardioid_root(int p, int q) {
    const Complex lam = root_of_unity(p, q);
    return lam / 2.0 - lam * lam / 4.0;
}

Complex extrapolate_to_zero(const std::vector<double>& h, const std::vector<Complex>& v) {
    if (h.empty() || h.size() != v.size()) {
        throw PreconditionError("extrapolate_to_zero", "need matching, nonempty sample lists");
    }
    std::vector<Complex> t = v;
    const std::size_t k = t.size();
    for (std::size_t lvl = 1; lvl < k; ++lvl) {
        for (std::size_t i = 0; i + lvl < k; ++i) {
            t[i] = (h[i + lvl] * t[i] - h[i] * t[i + 1]) / (h[i + lvl] - h[i]);
        }
    }
    return t[0];
}

PeriodicOrbit seed_orbit_with_multiplier(Complex c, int n, Complex target) {
    check_period(n, "seed_orbit_with_multiplier");
    std::vector<Complex> seeds;
    Complex z{};
    for (int i = 0; i < 200 * n && norm2(z) <= 4.0; ++i) {
        z = z * z + c;
        if (i >= 100 * n) {
            seeds.push_back(z);
        }
    }
    for (int j = 0; j < 64; ++j) {
        seeds.push_back(std::polar(1.5, kTwoPi * (j + 0.25) / 64));
        seeds.push_back(std::polar(0.6, kTwoPi * (j + 0.75) / 64));
    }
    bool any = false;
    PeriodicOrbit best;
    for (const Complex& s : seeds) {
        try {
            const PeriodicOrbit o = solve_periodic_point(c, n, s, 1e-10);
            if (!any || std::abs(o.multiplier - target) < std::abs(best.multiplier - target)) {
                best = o;
                any = true;
            }
        } catch (const NumericalError&) {
        }
    }
    if (!any) {
        throw NumericalError(Failure::NonConvergence, "seed_orbit_with_multiplier",
                             "no period-" + std::to_string(n) + " orbit found");
    }
    return best;
}

BifurcationSite locate_satellite(int n, int p, int q, Complex seed_c, Complex seed_z, RayLimitOptions opts) {
    check_period(n, "locate_satellite");
    check_rotation(p, q, "locate_satellite");
    if (q < 2) {
        throw PreconditionError("locate_satellite", "q must be at least 2");
    }
    if (q * n > kMaxPeriod) {
        throw PreconditionError("locate_satellite", "q*n must not exceed 24");
    }
    BifurcationSite s;
    s.n = n;
    s.p = ((p % q) + q) % q;
    s.q = q;
    s.lambda = root_of_unity(p, q);
    return finish_site(s, seed_c, seed_z, opts, "locate_satellite");
}

BifurcationSite locate_satellite(int n, int p, int q, const Complex* seed_c, RayLimitOptions opts) {
    check_period(n, "locate_satellite");
    check_rotation(p, q, "locate_satellite");
    const Complex lam = root_of_unity(p, q);
    if (seed_c != nullptr) {
        const PeriodicOrbit o = seed_orbit_with_multiplier(*seed_c, n, lam);
        return locate_satellite(n, p, q, *seed_c, o.point, opts);
    }
    if (n == 1) {
        return locate_satellite(n, p, q, cardioid_root(p, q), lam / 2.0, opts);
    }
    if (n == 2) {
        const Complex c = -1.0 + lam / 4.0;
        return locate_satellite(n, p, q, c, (-1.0 + std::sqrt(-lam)) / 2.0, opts);
    }
    throw PreconditionError("locate_satellite", "closed-form seeds exist only for n <= 2; supply seed_c");
}

BifurcationSite locate_primitive(int n, Complex seed_c, Complex seed_z, RayLimitOptions opts) {
    check_period(n, "locate_primitive");
    BifurcationSite s;
    s.n = n;
    s.q = 1;
    s.p = 0;
    s.lambda = Complex{1.0, 0.0};
    return finish_site(s, seed_c, seed_z, opts, "locate_primitive");
}

BifurcationSite locate_primitive(int n, Complex seed_c, RayLimitOptions opts) {
    check_period(n, "locate_primitive");
    const PeriodicOrbit o = seed_orbit_with_multiplier(seed_c, n, Complex{1.0, 0.0});
    return locate_primitive(n, seed_c, o.point, opts);
}

std::vector<Complex> ray_directions(const BifurcationSite& site) {
    if (site.dmu_qn == Complex{}) {
        throw PreconditionError("ray_directions", "site has no multiplier derivative");
    }
    if (site.primitive()) {
        const Complex d = -1.0 / (site.dmu_qn * site.dmu_qn);
        return {d / std::abs(d)};
    }
    const Complex d = Complex{0.0, 1.0} / site.dmu_qn;
    return {d / std::abs(d), -d / std::abs(d)};
}

Complex holomorphic_index(Complex multiplier) {
    if (multiplier == Complex{1.0, 0.0}) {
        throw NumericalError(Failure::MultiplierOne, "holomorphic_index", "multiplier equals 1");
    }
    return 1.0 / (1.0 - multiplier);
}

Complex jind(Complex multiplier) {
    if (multiplier == Complex{} || multiplier == Complex{1.0, 0.0}) {
        throw NumericalError(Failure::BranchUndefined, "jind", "multiplier is 0 or 1");
    }
    const Complex lg = std::log(multiplier);
    if (lg == Complex{}) {
        throw NumericalError(Failure::BranchUndefined, "jind", "log of the multiplier rounds to 0");
    }
    return Complex{0.0, -kTwoPi} / lg;
}

Complex lifted_phase_prediction(const BifurcationSite& site, Complex alpha) {
    if (alpha == Complex{} || !is_finite(alpha)) {
        throw PreconditionError("lifted_phase_prediction", "alpha must be nonzero and finite");
    }
    return Complex{0.0, -kTwoPi} / (site.dmu_qn * alpha);
}

SplitFixedPoints split_fixed_points(const BifurcationSite& site, Complex alpha) {
    constexpr std::string_view op = "split_fixed_points";
    if (site.primitive()) {
        throw PreconditionError(op, "satellite site required");
    }
    if (alpha == Complex{} || !is_finite(alpha)) {
        throw PreconditionError(op, "alpha must be nonzero and finite");
    }
    const double scale = 4.0 / std::abs(site.dmu_qn);
    if (std::abs(alpha) > 1e-2 * scale) {
        throw PreconditionError(op, "|alpha| exceeds 1e-2 times the site scale " + std::to_string(scale));
    }
    const Complex c = site.c0 + alpha;
    const int m = site.qn();

    SplitFixedPoints out;
    out.alpha = alpha;
    out.sigma = solve_periodic_point(c, site.n, site.z0);
    const double rho = std::pow(std::abs(alpha), 1.0 / site.q);
    out.varsigma = split_points_near(c, site.z0, site.n, site.q, rho);
    if (static_cast<int>(out.varsigma.size()) != site.q) {
        throw NumericalError(Failure::SeedCollision, op,
                             "found " + std::to_string(out.varsigma.size()) + " of " + std::to_string(site.q) +
                                 " distinct period-qn points");
    }
    for (const auto& v : out.varsigma) {
        if (std::abs(v.point - out.sigma.point) < 1e-6 * rho) {
            throw NumericalError(Failure::SeedCollision, op, "period-qn point coincides with sigma");
        }
    }
    if (std::abs(out.sigma.multiplier) < 1.0 || std::abs(out.varsigma.front().multiplier) < 1.0) {
        throw PreconditionError(op, "c0 + alpha lies inside a hyperbolic component");
    }
    // sigma as a fixed point of p^{qn}.
    out.sigma.multiplier = iterate_jet(c, out.sigma.point, m).dz_dz0;
    out.sigma.period = site.n;

    bool all_pos = true;
    for (const auto& v : out.varsigma) {
        if (!(holomorphic_index(v.multiplier).imag() > 0.0)) {
            all_pos = false;
        }
    }
    out.ray_sign = all_pos ? 1 : -1;
    return out;
}

WellBehavedReport wellbehaved_diagnostic(const SplitFixedPoints& split) {
    const std::size_t k = split.varsigma.size() + 1;
    if (split.varsigma.empty() || k > 7) {
        throw PreconditionError("wellbehaved_diagnostic", "split must hold 1..6 period-qn points");
    }
    WellBehavedReport r;
    r.indices.push_back(holomorphic_index(split.sigma.multiplier));
    for (const auto& v : split.varsigma) {
        r.indices.push_back(holomorphic_index(v.multiplier));
    }
    r.total = std::accumulate(r.indices.begin(), r.indices.end(), Complex{});
    r.min_subset_imag = INFINITY;
    const unsigned full = (1u << k) - 1u;
    for (unsigned mask = 1; mask < full; ++mask) {
        Complex s{};
        for (std::size_t i = 0; i < k; ++i) {
            if (mask & (1u << i)) {
                s += r.indices[i];
            }
        }
        r.min_subset_imag = std::min(r.min_subset_imag, std::abs(s.imag()));
    }
    r.ray_sign = split.ray_sign;
    return r;
}

double satellite_derivative_residual(const BifurcationSite& site) {
    if (site.primitive()) {
        throw PreconditionError("satellite_derivative_residual", "satellite site required");
    }
    const PeriodicOrbit o = solve_periodic_point(site.c0, site.n, site.z0);
    const Complex dmu_n = multiplier_derivative(site.c0, o.point, site.n);
    const double q2 = static_cast<double>(site.q) * site.q;
    return std::abs(dmu_n + site.dmu_qn / (q2 * std::conj(o.multiplier)));
}

}  // namespace parabolica
