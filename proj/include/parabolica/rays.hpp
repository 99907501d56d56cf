#pragma once

// External parameter rays of the Mandelbrot set: Boettcher potential and
// argument, ray tracing by potential stepping, approach sequences toward a
// landing point, and the exterior distance bound.

#include <iosfwd>
#include <string>
#include <vector>

#include "parabolica/parabolic.hpp"
#include "parabolica/types.hpp"

namespace parabolica {

inline constexpr double kRayEscapeRadius = 1e6;

/// Potentials are carried as their base-2 logarithm: deep ray points have
/// potentials far below the binary64 range.
struct RayPoint {
    Complex c{};
    Angle theta;
    double log2_potential = 0.0;

    double potential() const;
};

struct RayTrace {
    Angle theta;
    std::vector<RayPoint> points;
    Complex landing_estimate{};
};

struct BoettcherValue {
    double potential = 0.0;      ///< G(c) = 2^-n log|z_n|
    double log2_potential = 0.0; ///< log2 G(c), finite even when G underflows
    double argument = 0.0;       ///< external angle in turns, in [0, 1)
    /// 2^-n z_n'/z_n, the c-derivative of the complex potential; |G'| is its modulus.
    Complex derivative{};
    int escape_index = 0;        ///< n, first index with |z_n| > 1e6
};

/// Potential and gradient only; no argument. Throws InsideOrUndecided.
BoettcherValue boettcher_potential(Complex c, int depth);

/// Full evaluation. The argument is recovered by following the ray through c
/// outward to large |c|, halving the known doubled angle at each depth change.
BoettcherValue boettcher(Complex c, int depth);

/// Ray points from potential pot_start down to pot_end, steps_per_halving
/// points per halving of the potential. Throws NewtonLost if the ray jumps.
RayTrace trace_ray(const Angle& theta, double pot_start, double pot_end, int steps_per_halving = 8);

/// Points on the ray of angle theta at distances 0.1 * 2^{-k/2} from the site,
/// k = first .. first + count - 1, each within relative distance error 1e-3.
std::vector<Complex> approach_sequence(const BifurcationSite& site, const Angle& theta, int count,
                                       int first = 1);

/// Radius of a disk about c guaranteed to miss M: sinh(G) / (2 e^G |G'|).
/// Throws InsideOrUndecided if c does not escape within `depth` iterations.
double exterior_distance(Complex c, int depth = 100000);

/// Decimal rendering of 2^log2_value, valid far outside the binary64 range.
std::string format_pow2(double log2_value, int digits = 10);

/// CSV: theta_num, theta_den, potential, re, im.
void write_ray_csv(std::ostream& os, const RayTrace& trace);

}  // namespace parabolica
