#include "parabolica/orbits.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "parabolica/errors.hpp"

using namespace parabolica;

namespace {

// Attracting fixed point multiplier from the quadratic formula.
Complex mu1(Complex c) { return 1.0 - std::sqrt(1.0 - 4.0 * c); }

// The 2-cycle solves z^2 + z + c + 1 = 0, whose product of points is c + 1.
Complex mu2(Complex c) { return 4.0 * (c + 1.0); }

}  // namespace

TEST_CASE("find_periodic_orbit: superattracting cases") {
    const PeriodicOrbit a = find_periodic_orbit(0.0, 1, 0.1);
    CHECK(std::abs(a.point) < 1e-12);
    CHECK(std::abs(a.multiplier) < 1e-12);

    const PeriodicOrbit b = find_periodic_orbit(-1.0, 2, 0.1);
    CHECK(std::abs(b.point) < 1e-12);
    CHECK(std::abs(b.multiplier) < 1e-12);
    const auto pts = orbit_points(-1.0, b.point, 2);
    REQUIRE(pts.size() == 2);
    CHECK(std::abs(pts[1] + 1.0) < 1e-12);
}

TEST_CASE("find_periodic_orbit: parabolic fixed point at -3/4") {
    const PeriodicOrbit o = find_periodic_orbit(-0.75, 1, -0.4);
    CHECK(std::abs(o.point + 0.5) < 1e-6);
    CHECK(std::abs(o.multiplier + 1.0) < 1e-6);
}

TEST_CASE("find_periodic_orbit: returned point has the exact period and small residual") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 40; ++trial) {
        const Complex c{u(rng) * 1.5 - 0.5, u(rng)};
        const int n = 1 + trial % 5;
        try {
            const PeriodicOrbit o = find_periodic_orbit(c, n, Complex{u(rng), u(rng)});
            CHECK(o.period == n);
            CHECK(o.residual <= kOrbitResidualTol * 10.0);
            CHECK(has_exact_period(c, o.point, n));
            for (const Complex z : orbit_points(c, o.point, n)) {
                CHECK(std::abs(z) >= std::abs(o.point) - 1e-12);
            }
            ++checked;
        } catch (const NumericalError&) {
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("find_periodic_orbit: preconditions") {
    CHECK_THROWS_AS(find_periodic_orbit(0.0, 0, 0.1), PreconditionError);
    CHECK_THROWS_AS(find_periodic_orbit(0.0, kMaxPeriod + 1, 0.1), PreconditionError);
}

TEST_CASE("has_exact_period rejects lower periods") {
    // The fixed point of z^2 - 3/4 is also a solution of p^2(z) = z.
    CHECK_FALSE(has_exact_period(-0.75, -0.5, 2));
    CHECK(has_exact_period(-1.0, 0.0, 2));
}

TEST_CASE("multiplier_map: closed-form examples") {
    const MultiplierSample a = multiplier_map(-1.0, 2);
    CHECK(std::abs(a.mu) < 1e-10);
    CHECK(std::abs(a.dmu_dc - 4.0) < 1e-10);

    const MultiplierSample b = multiplier_map(0.0, 1);
    CHECK(std::abs(b.mu) < 1e-10);
    CHECK(std::abs(b.dmu_dc - 2.0) < 1e-10);

    const MultiplierSample c = multiplier_map(-0.76, 2);
    CHECK(std::abs(c.mu - 0.96) < 1e-10);
    CHECK(std::abs(c.dmu_dc - 4.0) < 1e-10);
}

TEST_CASE("multiplier_map: mu1 and mu2 match closed forms across their components") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        // Images of the disk |mu| < 0.95 under the inverse multiplier maps.
        const Complex m = std::polar(0.95 * std::sqrt(u(rng)), kTwoPi * u(rng));
        const Complex c1 = m / 2.0 - m * m / 4.0;
        const MultiplierSample s1 = multiplier_map(c1, 1);
        CHECK(std::abs(s1.mu - mu1(c1)) < 1e-10);
        CHECK(std::abs(s1.dmu_dc - 2.0 / (1.0 - m)) < 1e-9 * std::abs(2.0 / (1.0 - m)));

        const Complex c2 = m / 4.0 - 1.0;
        const MultiplierSample s2 = multiplier_map(c2, 2);
        CHECK(std::abs(s2.mu - mu2(c2)) < 1e-10);
        CHECK(std::abs(s2.dmu_dc - 4.0) < 1e-9);
    }
}

TEST_CASE("multiplier_map: derivative matches a difference quotient of mu") {
    const Complex c{-0.1, 0.75};  // inside the period-3 satellite
    const Complex seed = critical_orbit_seed(c, 3);
    const MultiplierSample s = multiplier_map(c, 3, seed);
    const double h = 1e-6;
    const Complex fwd = multiplier_map(c + h, 3, seed).mu;
    const Complex bwd = multiplier_map(c - h, 3, seed).mu;
    CHECK(std::abs((fwd - bwd) / (2.0 * h) - s.dmu_dc) < 1e-6 * std::abs(s.dmu_dc));
}

TEST_CASE("multiplier_map: singular implicit derivative at a root") {
    try {
        multiplier_map(0.25, 1, 0.5);
        FAIL("expected an error at the cusp");
    } catch (const NumericalError& e) {
        CHECK(e.kind() == Failure::SingularImplicit);
    }
}
