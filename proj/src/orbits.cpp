#include "parabolica/orbits.hpp"

#include <cmath>
#include <string>

#include "parabolica/dynamics.hpp"
#include "parabolica/errors.hpp"

namespace parabolica {
namespace {

void check_period(int n, std::string_view op) {
    if (n < 1 || n > kMaxPeriod) {
        throw PreconditionError(op, "period must lie in [1, 24], got " + std::to_string(n));
    }
}

Complex iterate(Complex c, Complex z, int k) {
    for (int i = 0; i < k; ++i) {
        z = z * z + c;
    }
    return z;
}

bool canonical_less(Complex a, Complex b) {
    const double na = std::abs(a);
    const double nb = std::abs(b);
    if (na != nb) {
        return na < nb;
    }
    if (a.real() != b.real()) {
        return a.real() > b.real();
    }
    return a.imag() > b.imag();
}

PeriodicOrbit newton_orbit(Complex c, int n, Complex seed, double tol, std::string_view op) {
    check_period(n, op);
    if (!(tol > 0.0)) {
        throw PreconditionError(op, "tolerance must be positive");
    }
    Complex z = seed;
    for (int it = 0; it < kMaxNewtonSteps; ++it) {
        const OrbitJet jet = iterate_jet(c, z, n);
        const Complex g = jet.z - z;
        const double residual = std::abs(g);
        if (residual < tol) {
            if (!has_exact_period(c, z, n)) {
                throw NumericalError(Failure::PeriodNotExact, op,
                                     "a proper divisor of " + std::to_string(n) + " also fixes the point");
            }
            return {c, n, z, jet.dz_dz0, residual};
        }
        const Complex gp = jet.dz_dz0 - 1.0;
        if (gp == Complex{}) {
            break;
        }
        const Complex dz = g / gp;
        z -= dz;
        if (!is_finite(z) || std::abs(dz) <= 1e-17 * (1.0 + std::abs(z))) {
            break;
        }
    }
    throw NumericalError(Failure::NonConvergence, op,
                         "Newton for period " + std::to_string(n) + " did not reach the residual tolerance");
}

}  // namespace

bool has_exact_period(Complex c, Complex z, int n) {
    for (int d = 1; d < n; ++d) {
        if (n % d == 0 && std::abs(iterate(c, z, d) - z) < kExactnessGuard) {
            return false;
        }
    }
    return true;
}

std::vector<Complex> orbit_points(Complex c, Complex point, int n) {
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(n));
    Complex z = point;
    for (int i = 0; i < n; ++i) {
        pts.push_back(z);
        z = z * z + c;
    }
    return pts;
}

PeriodicOrbit solve_periodic_point(Complex c, int n, Complex seed, double tol) {
    return newton_orbit(c, n, seed, tol, "solve_periodic_point");
}

PeriodicOrbit find_periodic_orbit(Complex c, int n, Complex seed, double tol) {
    PeriodicOrbit orbit = newton_orbit(c, n, seed, tol, "find_periodic_orbit");
    Complex best = orbit.point;
    for (const Complex& z : orbit_points(c, orbit.point, n)) {
        if (canonical_less(z, best)) {
            best = z;
        }
    }
    if (best != orbit.point) {
        // Rounding along the orbit can cost a few ulps of residual; polish
        // from the rotated point rather than trusting it as is.
        PeriodicOrbit rotated = newton_orbit(c, n, best, tol, "find_periodic_orbit");
        if (std::abs(rotated.point - best) < 1e-9) {
            orbit = rotated;
        }
    }
    return orbit;
}

Complex critical_orbit_seed(Complex c, int n, int steps) {
    check_period(n, "critical_orbit_seed");
    if (steps <= 0) {
        steps = 50 * n;
    }
    Complex z{};
    for (int i = 0; i < steps; ++i) {
        z = z * z + c;
        if (!(norm2(z) <= 4.0)) {
            throw NumericalError(Failure::Divergence, "critical_orbit_seed",
                                 "critical orbit escaped; c is outside the Mandelbrot set");
        }
    }
    return z;
}

MultiplierSample multiplier_map(Complex c, int n, Complex seed) {
    const PeriodicOrbit orbit = find_periodic_orbit(c, n, seed);
    const OrbitJet2 jet = iterate_jet2(c, orbit.point, n);
    const Complex g_z = jet.dz_dz0 - 1.0;
    if (std::abs(g_z) < kImplicitSingularity) {
        throw NumericalError(Failure::SingularImplicit, "multiplier_map",
                             "multiplier is within 1e-8 of 1; the orbit is not a smooth function of c here");
    }
    const Complex dz_dc = -jet.dz_dc / g_z;
    return {c, n, jet.dz_dz0, jet.d2z_dz0dc + jet.d2z_dz0dz0 * dz_dc};
}

MultiplierSample multiplier_map(Complex c, int n) {
    return multiplier_map(c, n, critical_orbit_seed(c, n));
}

}  // namespace parabolica
