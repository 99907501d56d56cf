#pragma once

// Periodic orbits of p_c, their multipliers, and the multiplier map of a
// hyperbolic component together with its parameter derivative.

#include <vector>

#include "parabolica/types.hpp"

namespace parabolica {

inline constexpr int kMaxPeriod = 24;
inline constexpr double kOrbitResidualTol = 1e-12;
/// A proper divisor d of n "also fixes" z when |p^d(z) - z| is below this.
inline constexpr double kExactnessGuard = 1e-8;
inline constexpr int kMaxNewtonSteps = 200;
/// |dg/dz| below this makes the implicit derivative of the orbit meaningless.
inline constexpr double kImplicitSingularity = 1e-8;

struct PeriodicOrbit {
    Complex c{};
    int period = 0;
    Complex point{};
    Complex multiplier{};
    double residual = 0.0;
};

struct MultiplierSample {
    Complex c{};
    int n = 0;
    Complex mu{};
    Complex dmu_dc{};
};

/// Newton on g(z) = p_c^n(z) - z from `seed`, then rotates to the canonical
/// orbit point: smallest |z|, ties broken by larger real part, then larger
/// imaginary part. Throws NonConvergence / PeriodNotExact.
PeriodicOrbit find_periodic_orbit(Complex c, int n, Complex seed, double tol = kOrbitResidualTol);

/// Same solver but keeps the point Newton converged to (no rotation along the
/// orbit). Used when the caller cares which orbit point is found.
PeriodicOrbit solve_periodic_point(Complex c, int n, Complex seed, double tol = kOrbitResidualTol);

/// All n points of the orbit through `point`, starting with `point`.
std::vector<Complex> orbit_points(Complex c, Complex point, int n);

/// True when no proper divisor d of n satisfies |p_c^d(z) - z| < kExactnessGuard.
bool has_exact_period(Complex c, Complex z, int n);

/// Last point of the critical orbit after `steps` iterations (default 50 n).
/// Inside a period-n hyperbolic component this lies near the attracting cycle.
Complex critical_orbit_seed(Complex c, int n, int steps = 0);

/// Multiplier of the period-n orbit found from `seed` and its derivative in c,
/// by implicit differentiation of p_c^n(z) = z with exact second-order jets.
/// Throws SingularImplicit when |dg/dz| < kImplicitSingularity.
MultiplierSample multiplier_map(Complex c, int n, Complex seed);

/// multiplier_map seeded from the critical orbit.
MultiplierSample multiplier_map(Complex c, int n);

}  // namespace parabolica
