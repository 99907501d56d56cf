#pragma once

// Iteration engine for the quadratic family p_c(z) = z^2 + c.

#include <cstdint>
#include <span>
#include <vector>

#include "parabolica/types.hpp"

namespace parabolica {

inline constexpr double kDefaultEscapeRadius = 2.0;
inline constexpr std::uint64_t kDefaultIterationCap = 100'000'000;

/// Orbits whose modulus passes this bound are reported as divergent by the jets.
inline constexpr double kJetDivergenceBound = 1e150;

struct EscapeOutcome {
    bool escaped = false;
    /// First n with |z_n| > R (z_0 = 0); equals the cap when not escaped.
    std::uint64_t n = 0;
    Complex final_z{};

    friend bool operator==(const EscapeOutcome&, const EscapeOutcome&) = default;
};

/// Orbit point z_k = p_c^k(z0) with its first partials.
struct OrbitJet {
    Complex z{};
    Complex dz_dz0{1.0, 0.0};
    Complex dz_dc{};
    int k = 0;
};

/// OrbitJet extended by the second partials needed for Newton in (c, z)
/// and for the parameter derivative of a multiplier.
struct OrbitJet2 {
    Complex z{};
    Complex dz_dz0{1.0, 0.0};
    Complex dz_dc{};
    Complex d2z_dz0dz0{};
    Complex d2z_dz0dc{};
    int k = 0;
};

/// Critical-orbit escape time: minimal n with |z_n| > R, or non-escape at max_iter.
/// Throws PreconditionError unless 2 <= R <= 1e150 and max_iter >= 1.
EscapeOutcome escape_time(Complex c, double R = kDefaultEscapeRadius,
                          std::uint64_t max_iter = kDefaultIterationCap);

/// Elementwise escape_time, order preserving. threads = 0 picks the default worker count.
std::vector<EscapeOutcome> escape_time_batch(std::span<const Complex> cs, double R = kDefaultEscapeRadius,
                                             std::uint64_t max_iter = kDefaultIterationCap,
                                             std::size_t threads = 0);

/// Interleaved kernel behind escape_time_batch; writes out[i] for each cs[i].
/// Results are bit-identical to escape_time. No argument checking.
void escape_time_block(std::span<const Complex> cs, double R, std::uint64_t max_iter,
                       std::span<EscapeOutcome> out);

/// k steps of p_c from z0 with dz/dz0 (seed 1) and dz/dc (seed 0).
/// Throws NumericalError(Divergence) if |z| exceeds kJetDivergenceBound.
OrbitJet iterate_jet(Complex c, Complex z0, int k);

OrbitJet2 iterate_jet2(Complex c, Complex z0, int k);

}  // namespace parabolica
